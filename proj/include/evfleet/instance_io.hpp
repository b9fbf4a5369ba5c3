#pragma once

// Canonical instance file: one JSON document, schema "evfleet.instance/1".
// write_instance(read_instance(text)) reproduces `text` byte for byte when
// `text` was produced by write_instance.

#include <filesystem>
#include <string>

#include "evfleet/domain.hpp"

namespace evfleet {

inline constexpr const char* kInstanceSchema = "evfleet.instance/1";

std::string serialize_instance(const Instance& inst);
Instance parse_instance(const std::string& text);

void write_instance(const std::filesystem::path& path, const Instance& inst);
Instance read_instance(const std::filesystem::path& path);

/// 16 hex digit FNV-1a hash of the canonical serialization.
std::string instance_fingerprint(const Instance& inst);

std::string fnv1a_hex(const std::string& bytes);

}  // namespace evfleet
