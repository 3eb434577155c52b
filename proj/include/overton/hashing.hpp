#pragma once

#include <initializer_list>
#include <string>
#include <string_view>

namespace overton {

/// Lowercase hex SHA-256 of `data`.
std::string sha256_hex(std::string_view data);

/// Hash of a field tuple. Each field is length-prefixed so that
/// ("ab","c") and ("a","bc") never collide.
std::string hash_fields(std::initializer_list<std::string_view> fields);

/// Shortest round-trip decimal form of a double, stable across platforms.
std::string canonical_double(double value);

}  // namespace overton
