#pragma once

#include <stdexcept>
#include <string>

#include "json.hpp"

namespace propsel {

// Missing files, malformed JSON, schema/version mismatches.
struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

constexpr int kFormatVersion = 1;

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

// Parses a JSON document and checks its format_version/kind header.
nlohmann::json load_document(const std::string& path, const std::string& expected_kind);

// {"format_version": .., "kind": ..} skeleton for output documents.
nlohmann::json make_document(const std::string& kind);

}  // namespace propsel
