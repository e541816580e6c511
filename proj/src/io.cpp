#include "propsel/io.hpp"

#include <fstream>
#include <sstream>

namespace propsel {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open " + path);
    std::ostringstream out;
    out << in.rdbuf();
    if (!in.good() && !in.eof()) throw InputError("error reading " + path);
    return out.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot open " + path + " for writing");
    out << content;
    if (!out.good()) throw InputError("error writing " + path);
}

nlohmann::json load_document(const std::string& path, const std::string& expected_kind) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(read_file(path));
    } catch (const nlohmann::json::parse_error& e) {
        throw InputError(path + ": " + e.what());
    }
    if (!doc.is_object() || !doc.contains("format_version") || !doc.contains("kind"))
        throw InputError(path + ": missing format header");
    if (doc["format_version"].get<int>() != kFormatVersion)
        throw InputError(path + ": format version " + doc["format_version"].dump() +
                         ", expected " + std::to_string(kFormatVersion));
    if (doc["kind"].get<std::string>() != expected_kind)
        throw InputError(path + ": kind '" + doc["kind"].get<std::string>() + "', expected '" +
                         expected_kind + "'");
    return doc;
}

nlohmann::json make_document(const std::string& kind) {
    nlohmann::json doc;
    doc["format_version"] = kFormatVersion;
    doc["kind"] = kind;
    return doc;
}

}  // namespace propsel
