#include "asgard/problems.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <numeric>

#include <openssl/evp.h>

#include "asgard/errors.hpp"
#include "asgard/rng.hpp"
#include "json.hpp"

namespace asgard {

namespace {

static_assert(std::endian::native == std::endian::little, "instance arrays are little-endian");

template <class... Ts> struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts> overloaded(Ts...) -> overloaded<Ts...>;

Matrix gaussian_rows(Index m, Index n, std::uint64_t seed) {
  CounterRng rng(seed, streams::kDesign);
  Matrix z(m, n);
  for (Index i = 0; i < m; ++i) {
    for (Index j = 0; j < n; ++j) z(i, j) = rng.normal();
  }
  return z;
}

// First k entries of a Fisher-Yates shuffle of 0..n-1, then sorted.
std::vector<Index> random_support(Index n, Index k, std::uint64_t seed) {
  CounterRng rng(seed, streams::kSupport);
  std::vector<Index> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), Index{0});
  for (Index i = 0; i < k; ++i) {
    const auto j = i + static_cast<Index>(rng.below(static_cast<std::uint64_t>(n - i)));
    std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
  }
  idx.resize(static_cast<std::size_t>(k));
  std::sort(idx.begin(), idx.end());
  return idx;
}

Vector planted_signs(Index n, Index k, std::uint64_t seed) {
  CounterRng signs(seed, streams::kSigns);
  Vector x = Vector::Zero(n);
  for (Index i : random_support(n, k, seed)) x[i] = signs.uniform() < 0.5 ? -1.0 : 1.0;
  return x;
}

ProblemSpec sparse_tv_problem(const Matrix &A, const Vector &b) {
  const Index n = A.cols();
  return ProblemSpec{SmoothTerm::least_squares(LinearMap::dense(A), b),
                     Proximable::l1(1.0),
                     Proximable::l1(1.0),
                     LinearMap::diff1d(n),
                     Scaling::identity(),
                     Vector::Zero(n - 1),
                     std::nullopt,
                     std::nullopt};
}

ProblemSpec basis_pursuit_problem(const Matrix &A, const Vector &c) {
  return ProblemSpec{SmoothTerm::zero(A.cols()),
                     Proximable::l1(1.0),
                     Proximable::indicator_point(c),
                     LinearMap::dense(A),
                     Scaling::identity(),
                     Vector::Zero(A.rows()),
                     c,
                     std::nullopt};
}

ProblemSpec kernel_problem(const Matrix &K, const Vector &p, double lambda) {
  const Index n = K.rows();
  SmoothTerm f = lambda > 0.0 ? SmoothTerm::quadratic_form(K, lambda) : SmoothTerm::zero(n);
  return ProblemSpec{std::move(f),
                     Proximable::l1(1.0 - lambda),
                     Proximable::l1_shifted(p, 1.0),
                     LinearMap::dense(K),
                     Scaling::identity(),
                     Vector::Zero(n),
                     std::nullopt,
                     std::nullopt};
}

using nlohmann::json;

json encode_matrix(const Matrix &m) {
  // Eigen is column-major; the document is row-major.
  const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm = m;
  return json{{"rows", m.rows()},
              {"cols", m.cols()},
              {"data", base64_encode_doubles(rm.data(), static_cast<std::size_t>(rm.size()))}};
}

json encode_vector(const Vector &v) {
  return json{{"rows", v.size()},
              {"cols", 1},
              {"data", base64_encode_doubles(v.data(), static_cast<std::size_t>(v.size()))}};
}

Matrix decode_matrix(const json &j) {
  const auto rows = j.at("rows").get<Index>();
  const auto cols = j.at("cols").get<Index>();
  const auto values = base64_decode_doubles(j.at("data").get<std::string>());
  if (static_cast<Index>(values.size()) != rows * cols) {
    throw ShapeError("instance array length does not match its rows x cols");
  }
  return Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      values.data(), rows, cols);
}

Vector decode_vector(const json &j) {
  const Matrix m = decode_matrix(j);
  return Eigen::Map<const Vector>(m.data(), m.size());
}

} // namespace

std::string InstanceSpec::kind_name() const {
  return std::visit(overloaded{
                        [](const SparseTvSpec &) { return std::string("sparse_tv_ls"); },
                        [](const BasisPursuitSpec &) { return std::string("basis_pursuit"); },
                        [](const KernelL1Spec &) { return std::string("kernel_l1"); },
                    },
                    kind);
}

Instance gen_sparse_tv_ls(Index n, Index m, double rho, std::uint64_t seed) {
  if (n < 2 || m < 1) throw ParameterError("sparse_tv_ls needs n > 1 and m >= 1");
  if (!(rho >= 0.0 && rho < 1.0)) throw ParameterError("sparse_tv_ls needs rho in [0, 1)");
  Matrix sigma(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) sigma(i, j) = std::pow(rho, static_cast<double>(std::abs(i - j)));
  }
  const Eigen::LLT<Matrix> llt(sigma);
  if (llt.info() != Eigen::Success) throw ParameterError("covariance is not positive definite");
  const Matrix L = llt.matrixL();
  // Row i of A is L z_i with z_i standard normal.
  const Matrix A = gaussian_rows(m, n, seed) * L.transpose();
  CounterRng resp(seed, streams::kResponse);
  const Vector b = resp.uniform_vector(m, 1.0, 2.0);
  return Instance{InstanceSpec{SparseTvSpec{n, m, rho}, seed}, sparse_tv_problem(A, b), A, b,
                  Vector()};
}

Instance gen_basis_pursuit(Index n, Index m, Index sparsity, std::uint64_t seed) {
  if (n < 2 || m < 1 || m >= n) throw ParameterError("basis_pursuit needs 1 <= m < n");
  if (sparsity < 0 || sparsity > n) throw ParameterError("basis_pursuit needs 0 <= sparsity <= n");
  const Matrix A = gaussian_rows(m, n, seed);
  const Vector x = planted_signs(n, sparsity, seed);
  // Same product as LinearMap::apply, so A x = c holds exactly.
  const Vector c = LinearMap::dense(A).apply(x);
  return Instance{InstanceSpec{BasisPursuitSpec{n, m, sparsity}, seed}, basis_pursuit_problem(A, c),
                  A, c, x};
}

Instance gen_kernel_l1(Index n_points, Index feat_dim, double sigma_kernel, double lambda,
                       std::uint64_t seed) {
  if (n_points < 2 || feat_dim < 1) throw ParameterError("kernel_l1 needs n_points > 1, feat_dim >= 1");
  if (!(sigma_kernel > 0.0)) throw ParameterError("kernel_l1 needs sigma_kernel > 0");
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw ParameterError("kernel_l1 needs lambda in [0, 1]");
  CounterRng feat(seed, streams::kFeatures);
  Matrix r(n_points, feat_dim);
  for (Index i = 0; i < n_points; ++i) {
    for (Index d = 0; d < feat_dim; ++d) r(i, d) = feat.uniform();
  }
  Matrix K(n_points, n_points);
  for (Index i = 0; i < n_points; ++i) {
    K(i, i) = 1.0;
    for (Index j = 0; j < i; ++j) {
      K(i, j) = K(j, i) = std::exp(-(r.row(i) - r.row(j)).lpNorm<1>() / sigma_kernel);
    }
  }
  const Index nnz = std::max<Index>(1, n_points / 10);
  const Vector x = planted_signs(n_points, nnz, seed);
  CounterRng noise(seed, streams::kResponse);
  const Vector p = LinearMap::dense(K).apply(x) + noise.uniform_vector(n_points, -0.01, 0.01);
  return Instance{InstanceSpec{KernelL1Spec{n_points, feat_dim, sigma_kernel, lambda}, seed},
                  kernel_problem(K, p, lambda), K, p, x};
}

Instance generate(const InstanceSpec &spec) {
  return std::visit(
      overloaded{
          [&](const SparseTvSpec &s) { return gen_sparse_tv_ls(s.n, s.m, s.rho, spec.seed); },
          [&](const BasisPursuitSpec &s) {
            return gen_basis_pursuit(s.n, s.m, s.sparsity, spec.seed);
          },
          [&](const KernelL1Spec &s) {
            return gen_kernel_l1(s.n_points, s.feat_dim, s.sigma_kernel, s.lambda, spec.seed);
          },
      },
      spec.kind);
}

std::string instance_to_json(const Instance &inst) {
  json doc;
  doc["kind"] = inst.spec.kind_name();
  doc["seed"] = inst.spec.seed;
  doc["dtype"] = "float64";
  doc["byte_order"] = "little";
  doc["layout"] = "row-major";
  std::visit(overloaded{
                 [&](const SparseTvSpec &s) {
                   doc["dims"] = {{"n", s.n}, {"m", s.m}, {"rho", s.rho}};
                   doc["covariance_convention"] = "rows";
                   doc["arrays"] = {{"A", encode_matrix(inst.design)}, {"b", encode_vector(inst.data)}};
                 },
                 [&](const BasisPursuitSpec &s) {
                   doc["dims"] = {{"n", s.n}, {"m", s.m}, {"sparsity", s.sparsity}};
                   doc["arrays"] = {{"A", encode_matrix(inst.design)},
                                    {"c", encode_vector(inst.data)},
                                    {"x_planted", encode_vector(inst.planted)}};
                 },
                 [&](const KernelL1Spec &s) {
                   doc["dims"] = {{"n_points", s.n_points},
                                  {"feat_dim", s.feat_dim},
                                  {"sigma_kernel", s.sigma_kernel},
                                  {"lambda", s.lambda}};
                   doc["arrays"] = {{"K", encode_matrix(inst.design)},
                                    {"p", encode_vector(inst.data)},
                                    {"x_planted", encode_vector(inst.planted)}};
                 },
             },
             inst.spec.kind);
  return doc.dump(2);
}

Instance instance_from_json(const std::string &text) {
  const json doc = json::parse(text);
  const auto kind = doc.at("kind").get<std::string>();
  const auto seed = doc.at("seed").get<std::uint64_t>();
  const json &dims = doc.at("dims");
  const json &arrays = doc.at("arrays");
  if (kind == "sparse_tv_ls") {
    const Matrix A = decode_matrix(arrays.at("A"));
    const Vector b = decode_vector(arrays.at("b"));
    SparseTvSpec s{dims.at("n").get<Index>(), dims.at("m").get<Index>(), dims.at("rho").get<double>()};
    if (A.rows() != s.m || A.cols() != s.n) throw ShapeError("A does not match dims");
    return Instance{InstanceSpec{s, seed}, sparse_tv_problem(A, b), A, b, Vector()};
  }
  if (kind == "basis_pursuit") {
    const Matrix A = decode_matrix(arrays.at("A"));
    const Vector c = decode_vector(arrays.at("c"));
    BasisPursuitSpec s{dims.at("n").get<Index>(), dims.at("m").get<Index>(),
                       dims.at("sparsity").get<Index>()};
    if (A.rows() != s.m || A.cols() != s.n) throw ShapeError("A does not match dims");
    return Instance{InstanceSpec{s, seed}, basis_pursuit_problem(A, c), A, c,
                    decode_vector(arrays.at("x_planted"))};
  }
  if (kind == "kernel_l1") {
    const Matrix K = decode_matrix(arrays.at("K"));
    const Vector p = decode_vector(arrays.at("p"));
    KernelL1Spec s{dims.at("n_points").get<Index>(), dims.at("feat_dim").get<Index>(),
                   dims.at("sigma_kernel").get<double>(), dims.at("lambda").get<double>()};
    if (K.rows() != s.n_points) throw ShapeError("K does not match dims");
    return Instance{InstanceSpec{s, seed}, kernel_problem(K, p, s.lambda), K, p,
                    decode_vector(arrays.at("x_planted"))};
  }
  throw ParameterError("unknown instance kind '" + kind + "'");
}

std::string base64_encode_doubles(const double *data, std::size_t count) {
  const std::size_t bytes = count * sizeof(double);
  std::string out(4 * ((bytes + 2) / 3), '\0');
  const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char *>(out.data()),
                                reinterpret_cast<const unsigned char *>(data), static_cast<int>(bytes));
  out.resize(static_cast<std::size_t>(n));
  return out;
}

std::vector<double> base64_decode_doubles(const std::string &text) {
  if (text.size() % 4 != 0) throw ParameterError("base64 text length is not a multiple of 4");
  std::string raw(3 * text.size() / 4, '\0');
  const int n = EVP_DecodeBlock(reinterpret_cast<unsigned char *>(raw.data()),
                                reinterpret_cast<const unsigned char *>(text.data()),
                                static_cast<int>(text.size()));
  if (n < 0) throw ParameterError("invalid base64 text");
  // EVP_DecodeBlock keeps the bytes produced by '=' padding.
  std::size_t len = static_cast<std::size_t>(n);
  for (auto it = text.rbegin(); it != text.rend() && *it == '='; ++it) --len;
  if (len % sizeof(double) != 0) throw ParameterError("base64 payload is not a float64 array");
  std::vector<double> out(len / sizeof(double));
  std::memcpy(out.data(), raw.data(), len);
  return out;
}

} // namespace asgard
