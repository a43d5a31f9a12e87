#include "sggmech/token_matrix.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "sggmech/error.hpp"
#include "sggmech/json_io.hpp"

namespace sggmech {

namespace {

constexpr char kMagic[8] = {'T', 'O', 'K', 'M', 'A', 'T', '0', '1'};

void put_u64_le(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint64_t get_u64_le(const unsigned char* p) {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}

void check_finite(const Matrix& m) {
  for (double v : m.data()) {
    if (!std::isfinite(v)) throw Error(ErrorCode::InvalidArgument, "token matrix has non-finite entries");
  }
}

}  // namespace

std::string_view to_string(TokenRole role) {
  switch (role) {
    case TokenRole::Visual: return "visual";
    case TokenRole::ObjectClass: return "object_class";
    case TokenRole::RelationClass: return "relation_class";
    case TokenRole::Interaction: return "interaction";
  }
  return "visual";
}

TokenRole token_role_from_string(std::string_view s) {
  if (s == "visual") return TokenRole::Visual;
  if (s == "object_class") return TokenRole::ObjectClass;
  if (s == "relation_class") return TokenRole::RelationClass;
  if (s == "interaction") return TokenRole::Interaction;
  throw Error(ErrorCode::InvalidArgument, "unknown token role '" + std::string(s) + "'");
}

TokenMatrix::TokenMatrix(Matrix m, TokenRole r) : values(std::move(m)), role(r) { check_finite(values); }

void write_token_matrix_text(const std::filesystem::path& path, const TokenMatrix& m) {
  std::string out = fmt::format("{} {} {}\n", m.rows(), m.dim(), to_string(m.role));
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const auto row = m.row(r);
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out.push_back(' ');
      out += fmt::format("{}", row[c]);
    }
    out.push_back('\n');
  }
  write_file(path, out);
}

void write_token_matrix_binary(const std::filesystem::path& path, const TokenMatrix& m) {
  std::string out(kMagic, sizeof kMagic);
  put_u64_le(out, m.rows());
  put_u64_le(out, m.dim());
  for (double v : m.values.data()) {
    const auto bits = std::bit_cast<std::uint32_t>(static_cast<float>(v));
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
  }
  write_file(path, out);
}

TokenMatrix read_token_matrix(const std::filesystem::path& path, TokenRole binary_role) {
  const std::string content = read_file(path);
  if (content.size() >= 8 && std::memcmp(content.data(), kMagic, 8) == 0) {
    if (content.size() < 24) throw Error(ErrorCode::Io, "truncated token matrix header: " + path.string());
    const auto* p = reinterpret_cast<const unsigned char*>(content.data());
    const std::uint64_t rows = get_u64_le(p + 8);
    const std::uint64_t dim = get_u64_le(p + 16);
    if (dim != 0 && rows > (content.size() - 24) / 4 / dim) {
      throw Error(ErrorCode::Io, "token matrix payload shorter than header claims: " + path.string());
    }
    if (content.size() != 24 + rows * dim * 4) {
      throw Error(ErrorCode::Io, "token matrix payload length mismatch: " + path.string());
    }
    std::vector<double> data(rows * dim);
    for (std::size_t i = 0; i < data.size(); ++i) {
      std::uint32_t bits = 0;
      for (int b = 3; b >= 0; --b) bits = (bits << 8) | p[24 + 4 * i + static_cast<std::size_t>(b)];
      data[i] = static_cast<double>(std::bit_cast<float>(bits));
    }
    return TokenMatrix(Matrix(rows, dim, std::move(data)), binary_role);
  }

  std::istringstream in(content);
  std::size_t rows = 0;
  std::size_t dim = 0;
  std::string role;
  if (!(in >> rows >> dim >> role)) throw Error(ErrorCode::Io, "bad token matrix header: " + path.string());
  std::vector<double> data;
  data.reserve(rows * dim);
  double v = 0.0;
  for (std::size_t i = 0; i < rows * dim; ++i) {
    if (!(in >> v)) throw Error(ErrorCode::Io, "token matrix has fewer values than rows*dim: " + path.string());
    data.push_back(v);
  }
  std::string extra;
  if (in >> extra) throw Error(ErrorCode::Io, "token matrix has trailing values: " + path.string());
  return TokenMatrix(Matrix(rows, dim, std::move(data)), token_role_from_string(role));
}

}  // namespace sggmech
