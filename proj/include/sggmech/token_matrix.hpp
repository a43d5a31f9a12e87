#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "sggmech/matrix.hpp"

namespace sggmech {

enum class TokenRole { Visual, ObjectClass, RelationClass, Interaction };

std::string_view to_string(TokenRole role);
TokenRole token_role_from_string(std::string_view s);

// Embedding rows tagged with the role they play in a scoring call.
struct TokenMatrix {
  Matrix values;
  TokenRole role = TokenRole::Visual;

  TokenMatrix() = default;
  TokenMatrix(Matrix m, TokenRole r);

  std::size_t rows() const noexcept { return values.rows(); }
  std::size_t dim() const noexcept { return values.cols(); }
  std::span<const double> row(std::size_t i) const { return values.row(i); }
};

// Text form: header "rows dim role" then one whitespace-separated row per line.
void write_token_matrix_text(const std::filesystem::path& path, const TokenMatrix& m);
// Binary form: "TOKMAT01", u64 rows, u64 dim (little-endian), then float32 values.
// The role is not stored.
void write_token_matrix_binary(const std::filesystem::path& path, const TokenMatrix& m);
// Detects the binary magic; binary files take `binary_role`.
TokenMatrix read_token_matrix(const std::filesystem::path& path, TokenRole binary_role = TokenRole::Visual);

}  // namespace sggmech
