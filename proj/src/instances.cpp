// SPDX-License-Identifier: Apache-2.0
#include "oed/instances.hpp"

#include <Eigen/Cholesky>
#include <Eigen/QR>

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "oed/rng.hpp"

namespace oed {
namespace {

std::string lower_copy(std::string_view text) {
  std::string out(text);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

double parse_double(const std::string& token, const std::string& where) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc{} || ptr != token.data() + token.size())
    throw ParseError(where + ": bad floating-point value '" + token + "'");
  return value;
}

long parse_long(const std::string& token, const std::string& where) {
  long value = 0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc{} || ptr != token.data() + token.size())
    throw ParseError(where + ": bad integer value '" + token + "'");
  return value;
}

std::string format_double_shortest(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

}  // namespace

const char* to_string(InstanceKind kind) {
  return kind == InstanceKind::Independent ? "independent" : "correlated";
}

InstanceKind instance_kind_from_string(std::string_view text) {
  std::string t = lower_copy(text);
  if (t == "independent") return InstanceKind::Independent;
  if (t == "correlated") return InstanceKind::Correlated;
  throw ParseError("unknown instance kind '" + std::string(text) +
                   "' (expected independent or correlated)");
}

void InstanceSpec::validate() const {
  if (n < 1 || m < n)
    throw std::invalid_argument("instance sizes must satisfy 1 <= n <= m");
  if (!(rho >= 0.0 && rho < 1.0))
    throw std::invalid_argument("rho must lie in [0, 1)");
}

DesignProblem generate(const InstanceSpec& spec) {
  spec.validate();
  DesignProblem problem;
  const int m = spec.m, n = spec.n;
  problem.budget = (3 * n) / 2;  // floor(3n/2) >= n, so N >= n holds

  // Row covariance factor for correlated rows: S_ij = rho^|i-j|, S = C C'.
  Eigen::MatrixXd chol_cov;
  if (spec.kind == InstanceKind::Correlated) {
    Eigen::MatrixXd S(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        S(i, j) = std::pow(spec.rho, std::abs(i - j));
    chol_cov = Eigen::LLT<Eigen::MatrixXd>(S).matrixL();
  }

  // Rank-deficient draws are discarded; the attempt counter keys a fresh
  // substream so regeneration stays reproducible.
  for (unsigned long attempt = 0;; ++attempt) {
    if (attempt > 64)
      throw RankError("could not draw a full-column-rank design matrix");
    Rng rng = Rng::substream(spec.seed, "matrix", attempt);
    problem.A.resize(m, n);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < n; ++j) problem.A(i, j) = rng.normal();
    if (spec.kind == InstanceKind::Correlated)
      problem.A = problem.A * chol_cov.transpose();
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(problem.A);
    if (qr.rank() == n) break;
  }

  const long cap_hi = std::max(1L, static_cast<long>(problem.budget) / 3);
  Rng cap_rng = Rng::substream(spec.seed, "caps");
  problem.caps.resize(m);
  long cap_sum = 0;
  for (int i = 0; i < m; ++i) {
    problem.caps[i] = static_cast<int>(cap_rng.uniform_int(1, cap_hi));
    cap_sum += problem.caps[i];
  }
  // Caps must admit the budget; raise them round-robin when m is tiny.
  for (int i = 0; cap_sum < problem.budget; i = (i + 1) % m) {
    ++problem.caps[i];
    ++cap_sum;
  }
  return problem;
}

DesignProblem read_instance(std::istream& in, const std::string& name) {
  std::vector<std::string> tokens;
  std::string tok;
  while (in >> tok) tokens.push_back(tok);
  size_t pos = 0;
  auto next = [&](const std::string& what) -> const std::string& {
    if (pos >= tokens.size())
      throw ParseError(name + ": unexpected end of file while reading " + what);
    return tokens[pos++];
  };

  DesignProblem problem;
  const long m = parse_long(next("m"), name);
  const long n = parse_long(next("n"), name);
  const long budget = parse_long(next("N"), name);
  if (m < 1 || n < 1 || n > m)
    throw ParseError(name + ": header must satisfy 1 <= n <= m");
  if (budget < 1) throw ParseError(name + ": budget must be positive");
  problem.budget = static_cast<int>(budget);

  problem.caps.resize(m);
  for (long i = 0; i < m; ++i) {
    long cap = parse_long(next("cap"), name);
    if (cap < 1) throw ParseError(name + ": caps must be at least 1");
    problem.caps[i] = static_cast<int>(cap);
  }
  problem.A.resize(m, n);
  for (long i = 0; i < m; ++i)
    for (long j = 0; j < n; ++j)
      problem.A(i, j) = parse_double(next("matrix entry"), name);
  if (pos != tokens.size())
    throw ParseError(name + ": trailing tokens after the matrix");

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(problem.A);
  if (qr.rank() < n)
    throw RankError(name + ": design matrix is column-rank-deficient");
  return problem;
}

DesignProblem read_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open instance file");
  return read_instance(in, path);
}

void write_instance(const DesignProblem& problem, std::ostream& out) {
  const Eigen::Index m = problem.A.rows();
  const Eigen::Index n = problem.A.cols();
  out << m << ' ' << n << ' ' << problem.budget << '\n';
  for (Eigen::Index i = 0; i < m; ++i)
    out << problem.caps[i] << (i + 1 < m ? ' ' : '\n');
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      out << format_double_shortest(problem.A(i, j)) << (j + 1 < n ? ' ' : '\n');
}

void write_instance(const DesignProblem& problem, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError(path + ": cannot open file for writing");
  write_instance(problem, out);
}

std::string instance_to_string(const DesignProblem& problem) {
  std::ostringstream out;
  write_instance(problem, out);
  return out.str();
}

std::string fingerprint(const DesignProblem& problem) {
  std::uint64_t h = fnv1a64(instance_to_string(problem));
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), h, 16);
  std::string hex(buf, ptr);
  return "fnv1a64:" + std::string(16 - hex.size(), '0') + hex;
}

}  // namespace oed
