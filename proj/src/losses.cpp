#include "sggmech/losses.hpp"

#include <algorithm>
#include <cmath>

#include "sggmech/error.hpp"
#include "sggmech/kernels.hpp"
#include "sggmech/matching.hpp"

namespace sggmech {

namespace {

double sign(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

void require_same_length(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw Error(ErrorCode::LengthMismatch,
                std::string(what) + ": " + std::to_string(a) + " vs " + std::to_string(b));
  }
}

void require_probability_open(double p) {
  if (!(p > 0.0 && p < 1.0)) throw Error(ErrorCode::InvalidProbability, "prediction must be in (0,1)");
}

}  // namespace

double l1_box_loss(std::span<const BoundingBox> pred, std::span<const BoundingBox> gt) {
  require_same_length(pred.size(), gt.size(), "box lists");
  if (pred.empty()) throw Error(ErrorCode::EmptyInput, "no boxes");
  double sum = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    sum += std::abs(pred[i].x1 - gt[i].x1) + std::abs(pred[i].y1 - gt[i].y1) + std::abs(pred[i].x2 - gt[i].x2) +
           std::abs(pred[i].y2 - gt[i].y2);
  }
  return sum / static_cast<double>(pred.size());
}

std::vector<std::array<double, 4>> l1_box_loss_grad(std::span<const BoundingBox> pred,
                                                    std::span<const BoundingBox> gt) {
  require_same_length(pred.size(), gt.size(), "box lists");
  if (pred.empty()) throw Error(ErrorCode::EmptyInput, "no boxes");
  const double inv_n = 1.0 / static_cast<double>(pred.size());
  std::vector<std::array<double, 4>> g(pred.size());
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const auto p = pred[i].corners();
    const auto t = gt[i].corners();
    for (std::size_t k = 0; k < 4; ++k) g[i][k] = sign(p[k] - t[k]) * inv_n;
  }
  return g;
}

double giou_loss(const BoundingBox& pred, const BoundingBox& gt) {
  const auto t = giou_terms(pred, gt);
  const double iou_part = t.uni > 0.0 ? t.inter / t.uni : 0.0;
  const double penalty = t.enclosing > 0.0 ? (t.enclosing - t.uni) / t.enclosing : 0.0;
  return 1.0 - iou_part + penalty;
}

std::array<double, 4> giou_loss_grad(const BoundingBox& p, const BoundingBox& g) {
  const double iw_raw = std::min(p.x2, g.x2) - std::max(p.x1, g.x1);
  const double ih_raw = std::min(p.y2, g.y2) - std::max(p.y1, g.y1);
  const bool overlap = iw_raw > 0.0 && ih_raw > 0.0;
  const double iw = overlap ? iw_raw : 0.0;
  const double ih = overlap ? ih_raw : 0.0;
  const double inter = iw * ih;
  const double uni = p.area() + g.area() - inter;
  const double ew = std::max(p.x2, g.x2) - std::min(p.x1, g.x1);
  const double eh = std::max(p.y2, g.y2) - std::min(p.y1, g.y1);
  const double enc = ew * eh;

  // Partials with respect to (x1, y1, x2, y2) of the prediction.
  std::array<double, 4> d_iw{0, 0, 0, 0}, d_ih{0, 0, 0, 0};
  if (overlap) {
    d_iw[0] = p.x1 > g.x1 ? -1.0 : 0.0;
    d_iw[2] = p.x2 < g.x2 ? 1.0 : 0.0;
    d_ih[1] = p.y1 > g.y1 ? -1.0 : 0.0;
    d_ih[3] = p.y2 < g.y2 ? 1.0 : 0.0;
  }
  const std::array<double, 4> d_area{-(p.y2 - p.y1), -(p.x2 - p.x1), (p.y2 - p.y1), (p.x2 - p.x1)};
  const std::array<double, 4> d_ew{p.x1 < g.x1 ? -1.0 : 0.0, 0.0, p.x2 > g.x2 ? 1.0 : 0.0, 0.0};
  const std::array<double, 4> d_eh{0.0, p.y1 < g.y1 ? -1.0 : 0.0, 0.0, p.y2 > g.y2 ? 1.0 : 0.0};

  std::array<double, 4> grad{0, 0, 0, 0};
  for (std::size_t k = 0; k < 4; ++k) {
    const double d_inter = d_iw[k] * ih + iw * d_ih[k];
    const double d_uni = d_area[k] - d_inter;
    const double d_enc = d_ew[k] * eh + ew * d_eh[k];
    double d = 0.0;
    // loss = 2 - inter/uni - uni/enc
    if (uni > 0.0) d -= (d_inter * uni - inter * d_uni) / (uni * uni);
    if (enc > 0.0) d -= (d_uni * enc - uni * d_enc) / (enc * enc);
    grad[k] = d;
  }
  return grad;
}

double focal_loss(double y, double alpha, double gamma) {
  if (!(y > 0.0 && y <= 1.0)) throw Error(ErrorCode::InvalidProbability, "true-class probability must be in (0,1]");
  if (y == 1.0) return 0.0;
  return -alpha * std::pow(1.0 - y, gamma) * std::log(y);
}

double focal_loss_grad(double y, double alpha, double gamma) {
  if (!(y > 0.0 && y <= 1.0)) throw Error(ErrorCode::InvalidProbability, "true-class probability must be in (0,1]");
  const double one_minus = 1.0 - y;
  double g = -alpha * std::pow(one_minus, gamma) / y;
  if (gamma != 0.0 && one_minus > 0.0) g += alpha * gamma * std::pow(one_minus, gamma - 1.0) * std::log(y);
  return g;
}

namespace {
void check_bce_inputs(const Matrix& pred, const Matrix& gt) {
  if (pred.rows() != gt.rows() || pred.cols() != gt.cols()) {
    throw Error(ErrorCode::ShapeMismatch, "prediction and label matrices differ in shape");
  }
  if (pred.empty()) throw Error(ErrorCode::EmptyInput, "no relation entries");
  for (double p : pred.data()) require_probability_open(p);
  for (double y : gt.data()) {
    if (!(y >= 0.0 && y <= 1.0)) throw Error(ErrorCode::InvalidProbability, "label must be in [0,1]");
  }
}
}  // namespace

double bce_relation_loss(const Matrix& pred, const Matrix& gt) {
  check_bce_inputs(pred, gt);
  double sum = 0.0;
  for (std::size_t i = 0; i < pred.data().size(); ++i) {
    const double p = pred.data()[i];
    const double y = gt.data()[i];
    sum += y * std::log(p) + (1.0 - y) * std::log1p(-p);
  }
  return -sum / static_cast<double>(pred.data().size());
}

Matrix bce_relation_loss_grad(const Matrix& pred, const Matrix& gt) {
  check_bce_inputs(pred, gt);
  const double inv_n = 1.0 / static_cast<double>(pred.data().size());
  Matrix g(pred.rows(), pred.cols());
  for (std::size_t i = 0; i < pred.data().size(); ++i) {
    const double p = pred.data()[i];
    const double y = gt.data()[i];
    g.data()[i] = -inv_n * (y / p - (1.0 - y) / (1.0 - p));
  }
  return g;
}

std::vector<EdgeFeature> build_edge_features(const std::vector<QueryPrediction>& queries,
                                             std::span<const std::pair<std::size_t, std::size_t>> pairs,
                                             const std::optional<std::vector<double>>& global_rel) {
  std::vector<EdgeFeature> edges;
  edges.reserve(pairs.size());
  std::optional<std::size_t> dim;
  auto feature_of = [&](std::size_t idx) -> const std::vector<double>& {
    if (idx >= queries.size()) throw Error(ErrorCode::InvalidArgument, "query index out of range");
    const auto& f = queries[idx].feature;
    if (!f) throw Error(ErrorCode::MissingFeature, "query " + std::to_string(idx) + " has no feature");
    if (!dim) dim = f->size();
    if (f->size() != *dim) throw Error(ErrorCode::DimMismatch, "query features differ in dimension");
    return *f;
  };
  for (const auto& [i, j] : pairs) {
    if (i == j) throw Error(ErrorCode::InvalidArgument, "edge pairs a query with itself");
    const auto& fi = feature_of(i);
    const auto& fj = feature_of(j);
    if (global_rel && global_rel->size() != fi.size()) {
      throw Error(ErrorCode::DimMismatch, "global relation embedding dimension differs from query features");
    }
    EdgeFeature e;
    e.pair = {i, j};
    e.vector.reserve(fi.size() * 2);
    e.vector.insert(e.vector.end(), fi.begin(), fi.end());
    e.vector.insert(e.vector.end(), fj.begin(), fj.end());
    if (global_rel) {
      for (std::size_t k = 0; k < fi.size(); ++k) {
        e.vector[k] += (*global_rel)[k];
        e.vector[fi.size() + k] += (*global_rel)[k];
      }
    }
    edges.push_back(std::move(e));
  }
  return edges;
}

std::vector<EdgeFeature> negatives_only(const std::vector<EdgeFeature>& edges) {
  std::vector<EdgeFeature> out;
  std::copy_if(edges.begin(), edges.end(), std::back_inserter(out), [](const EdgeFeature& e) { return e.is_negative; });
  return out;
}

Matrix edge_matrix(const std::vector<EdgeFeature>& edges) {
  if (edges.empty()) return Matrix();
  const std::size_t d = edges.front().vector.size();
  Matrix m(edges.size(), d);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    if (edges[i].vector.size() != d) throw Error(ErrorCode::LengthMismatch, "edge vectors differ in dimension");
    std::copy(edges[i].vector.begin(), edges[i].vector.end(), m.row(i).begin());
  }
  return m;
}

double vrd_loss(const std::vector<EdgeFeature>& student, const std::vector<EdgeFeature>& teacher) {
  require_same_length(student.size(), teacher.size(), "student/teacher edge counts");
  if (student.empty()) throw Error(ErrorCode::EmptyNegativeSet, "no negative edges");
  return vrd_loss(edge_matrix(student), edge_matrix(teacher));
}

double vrd_loss(const Matrix& student, const Matrix& teacher) {
  require_same_length(student.rows(), teacher.rows(), "student/teacher edge counts");
  require_same_length(student.cols(), teacher.cols(), "student/teacher edge dims");
  if (student.rows() == 0) throw Error(ErrorCode::EmptyNegativeSet, "no negative edges");
  double sum = 0.0;
  for (std::size_t i = 0; i < student.rows(); ++i) {
    double row = 0.0;
    const auto s = student.row(i);
    const auto t = teacher.row(i);
    for (std::size_t k = 0; k < s.size(); ++k) row += std::abs(s[k] - t[k]);
    sum += row;
  }
  return sum / static_cast<double>(student.rows());
}

Matrix vrd_loss_grad(const Matrix& student, const Matrix& teacher) {
  require_same_length(student.rows(), teacher.rows(), "student/teacher edge counts");
  require_same_length(student.cols(), teacher.cols(), "student/teacher edge dims");
  if (student.rows() == 0) throw Error(ErrorCode::EmptyNegativeSet, "no negative edges");
  const double inv_n = 1.0 / static_cast<double>(student.rows());
  Matrix g(student.rows(), student.cols());
  for (std::size_t i = 0; i < student.data().size(); ++i) {
    g.data()[i] = sign(student.data()[i] - teacher.data()[i]) * inv_n;
  }
  return g;
}

Matrix cosine_sim_matrix(const std::vector<EdgeFeature>& edges) {
  if (edges.size() < 2) throw Error(ErrorCode::TooFewEdges, "need at least two edges");
  return cosine_sim_matrix(edge_matrix(edges));
}

Matrix cosine_sim_matrix(const Matrix& edges) {
  if (edges.rows() < 2) throw Error(ErrorCode::TooFewEdges, "need at least two edges");
  return kernels::parallel::cosine_similarity(edges);
}

double rrd_loss(const std::vector<EdgeFeature>& student, const std::vector<EdgeFeature>& teacher) {
  require_same_length(student.size(), teacher.size(), "student/teacher edge counts");
  if (student.size() < 2) throw Error(ErrorCode::TooFewEdges, "need at least two edges");
  return rrd_loss(edge_matrix(student), edge_matrix(teacher));
}

double rrd_loss(const Matrix& student, const Matrix& teacher) {
  require_same_length(student.rows(), teacher.rows(), "student/teacher edge counts");
  const Matrix ms = cosine_sim_matrix(student);
  const Matrix mt = cosine_sim_matrix(teacher);
  double sum = 0.0;
  for (std::size_t i = 0; i < ms.data().size(); ++i) {
    const double d = ms.data()[i] - mt.data()[i];
    sum += d * d;
  }
  const double n = static_cast<double>(student.rows());
  return sum / (n * n);
}

Matrix rrd_loss_grad(const Matrix& student, const Matrix& teacher) {
  require_same_length(student.rows(), teacher.rows(), "student/teacher edge counts");
  const Matrix ms = cosine_sim_matrix(student);
  const Matrix mt = cosine_sim_matrix(teacher);
  const std::size_t n = student.rows();
  const std::size_t d = student.cols();
  const double nn = static_cast<double>(n) * static_cast<double>(n);

  std::vector<double> norms(n);
  Matrix unit(n, d);
  for (std::size_t i = 0; i < n; ++i) {
    norms[i] = std::sqrt(dot(student.row(i), student.row(i)));
    if (norms[i] > 0.0) {
      for (std::size_t k = 0; k < d; ++k) unit(i, k) = student(i, k) / norms[i];
    }
  }
  // dM_ij/ds_i = (u_j - M_ij u_i) / |s_i|; both (i,j) and (j,i) entries depend on s_i.
  Matrix g(n, d);
  for (std::size_t i = 0; i < n; ++i) {
    if (norms[i] <= 0.0) continue;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i || norms[j] <= 0.0) continue;
      const double coeff = 4.0 * (ms(i, j) - mt(i, j)) / (nn * norms[i]);
      for (std::size_t k = 0; k < d; ++k) g(i, k) += coeff * (unit(j, k) - ms(i, j) * unit(i, k));
    }
  }
  return g;
}

double total_loss(const LossComponents& c, const LossWeights& w) {
  for (double v : {c.reg, c.giou, c.obj, c.rel, c.vrd, c.rrd}) {
    if (!std::isfinite(v)) throw Error(ErrorCode::NonFiniteComponent, "loss component is not finite");
  }
  return c.reg + c.giou + c.obj + c.rel + w.beta1 * c.vrd + w.beta2 * c.rrd;
}

}  // namespace sggmech
