#include "fpl/coefficients.hpp"

#include <array>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "fpl/binary_io.hpp"

namespace fpl {

namespace {

constexpr char kTableMagic[8] = {'F', 'P', 'L', 'C', 'O', 'N', 'V', '\0'};
constexpr std::uint32_t kTableVersion = 1;

using BasisColumns = Eigen::Matrix<double, Eigen::Dynamic, 4>;

void check_space(const DgSpace& expected, const DgField& f) {
  if (&f.space() != &expected &&
      (f.space().num_elements() != expected.num_elements() || f.space().num_basis() != expected.num_basis() ||
       f.space().mesh().half_width() != expected.mesh().half_width() ||
       f.space().quad_order() != expected.quad_order()))
    throw std::invalid_argument("field mesh/basis does not match the coefficient source");
}

Index3 minus(const Index3& a, const Index3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }

}  // namespace

RowMatrix eval_diffusion(const CoefficientSource& source, const DgField& f) {
  return source.evaluate(f, VecDgField(f.space_ptr())).diffusion;
}

AdvectionSamples eval_advection(const CoefficientSource& source, const VecDgField& grad) {
  CoefficientFields c = source.evaluate(DgField(grad[0].space_ptr()), grad);
  return {std::move(c.advection), std::move(c.face_advection)};
}

// ---------------------------------------------------------------------------
// ConvolutionTable

ConvolutionTable::ConvolutionTable(Uninitialized, SpacePtr space, KernelSpec spec, int quad_order)
    : space_(std::move(space)),
      spec_(spec),
      quad_order_(quad_order < 0 ? space_->quad_order() : quad_order),
      rows_(space_->num_volume_nodes() + 3 * space_->num_face_nodes()) {
  spec_.validate();
  if (spec_.model != KineticModel::nonrelativistic)
    throw std::invalid_argument("convolution table requires the nonrelativistic kernel");
  if (quad_order_ < 1) throw std::invalid_argument("table quadrature order must be positive");
}

ConvolutionTable::ConvolutionTable(SpacePtr space, KernelSpec spec, int quad_order)
    : ConvolutionTable(Uninitialized{}, std::move(space), spec, quad_order) {
  compute();
}

int ConvolutionTable::offset_index(const Index3& delta) const {
  const int n = space_->mesh().cells();
  const int s = 2 * n;
  for (int d = 0; d < 3; ++d)
    if (delta[d] < -n || delta[d] >= n) throw std::out_of_range("element offset outside the table");
  return ((delta[0] + n) * s + (delta[1] + n)) * s + (delta[2] + n);
}

Eigen::Map<const RowMatrix> ConvolutionTable::block(int offset, int row0, int count) const {
  const int nb = space_->num_basis();
  const std::size_t start = (static_cast<std::size_t>(offset) * rows_ + row0) * kSymComponents * nb;
  return {data_.data() + start, count * kSymComponents, nb};
}

Mat3 ConvolutionTable::entry(const Index3& delta, int row, int j) const {
  const auto b = block(offset_index(delta), row, 1);
  double s[kSymComponents];
  for (int c = 0; c < kSymComponents; ++c) s[c] = b(c, j);
  return unpack_symmetric(s);
}

void ConvolutionTable::compute() {
  const DgSpace& s = *space_;
  const int n = s.mesh().cells();
  const double h = s.mesh().width();
  const int nb = s.num_basis();
  const int nv = s.num_volume_nodes();
  const int nf = s.num_face_nodes();

  // Source-element quadrature (possibly finer than the assembly rule).
  const auto rule = gauss_legendre<double>(quad_order_);
  const int m = rule.order();
  const int nq = m * m * m;
  std::vector<Vec3> q_local(static_cast<std::size_t>(nq));
  Eigen::VectorXd q_weight(nq);
  Eigen::MatrixXd q_basis(nq, nb);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      for (int k = 0; k < m; ++k) {
        const int q = (i * m + j) * m + k;
        const Vec3 eta(rule.nodes[i], rule.nodes[j], rule.nodes[k]);
        q_local[q] = 0.5 * h * eta;
        q_weight[q] = rule.weights[i] * rule.weights[j] * rule.weights[k] * 0.125 * h * h * h;
        q_basis.row(q) = s.basis_scale() * s.basis().values(eta).transpose();
      }

  std::vector<Vec3> targets;
  targets.reserve(static_cast<std::size_t>(rows_));
  for (int a = 0; a < nv; ++a) targets.push_back(0.5 * h * s.volume_reference_node(a));
  for (int axis = 0; axis < 3; ++axis)
    for (int j = 0; j < nf; ++j) targets.push_back(0.5 * h * s.face_reference_node(axis, 0, j));

  const int side = 2 * n;
  const int offsets = side * side * side;
  const std::size_t block_size = static_cast<std::size_t>(rows_) * kSymComponents * nb;
  data_.assign(static_cast<std::size_t>(offsets) * block_size, 0.0);
  const double gamma = spec_.gamma;

#pragma omp parallel for schedule(dynamic)
  for (int o = 0; o < offsets; ++o) {
    const Vec3 center(h * (o / (side * side) - n), h * ((o / side) % side - n), h * (o % side - n));
    Eigen::MatrixXd kq(rows_ * kSymComponents, nq);
    for (int r = 0; r < rows_; ++r)
      for (int q = 0; q < nq; ++q) {
        const Vec3 d = targets[r] - (center + q_local[q]);
        const double r2 = d.squaredNorm();
        const double lam = gamma == 0.0 ? 1.0 : std::pow(r2, 0.5 * gamma);
        const double w = q_weight[q] * lam;
        kq(r * 6 + 0, q) = w * (r2 - d[0] * d[0]);
        kq(r * 6 + 1, q) = w * (r2 - d[1] * d[1]);
        kq(r * 6 + 2, q) = w * (r2 - d[2] * d[2]);
        kq(r * 6 + 3, q) = -w * d[0] * d[1];
        kq(r * 6 + 4, q) = -w * d[0] * d[2];
        kq(r * 6 + 5, q) = -w * d[1] * d[2];
      }
    Eigen::Map<RowMatrix> out(data_.data() + static_cast<std::size_t>(o) * block_size, rows_ * kSymComponents, nb);
    out.noalias() = kq * q_basis;
  }
}

void ConvolutionTable::save(const std::filesystem::path& path) const {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open table cache for writing: " + path.string());
  os.write(kTableMagic, sizeof(kTableMagic));
  io::write_le<std::uint32_t>(os, kTableVersion);
  io::write_le<std::uint32_t>(os, static_cast<std::uint32_t>(space_->mesh().cells()));
  io::write_le<std::uint32_t>(os, static_cast<std::uint32_t>(space_->degree()));
  io::write_le<std::uint32_t>(os, static_cast<std::uint32_t>(quad_order_));
  io::write_le<double>(os, spec_.gamma);
  io::write_le<double>(os, space_->mesh().half_width());
  io::write_le<std::uint64_t>(os, data_.size());
  io::write_doubles(os, data_.data(), data_.size());
  if (!os) throw std::runtime_error("failed writing table cache: " + path.string());
}

std::optional<ConvolutionTable> ConvolutionTable::load(const std::filesystem::path& path, SpacePtr space,
                                                       KernelSpec spec, int quad_order) {
  std::ifstream is(path, std::ios::binary);
  if (!is) return std::nullopt;
  ConvolutionTable t(Uninitialized{}, std::move(space), spec, quad_order);
  try {
    char magic[8];
    if (!is.read(magic, sizeof(magic)) || std::memcmp(magic, kTableMagic, sizeof(magic)) != 0) return std::nullopt;
    if (io::read_le<std::uint32_t>(is) != kTableVersion) return std::nullopt;
    if (io::read_le<std::uint32_t>(is) != static_cast<std::uint32_t>(t.space_->mesh().cells())) return std::nullopt;
    if (io::read_le<std::uint32_t>(is) != static_cast<std::uint32_t>(t.space_->degree())) return std::nullopt;
    if (io::read_le<std::uint32_t>(is) != static_cast<std::uint32_t>(t.quad_order_)) return std::nullopt;
    if (io::read_le<double>(is) != t.spec_.gamma) return std::nullopt;
    if (io::read_le<double>(is) != t.space_->mesh().half_width()) return std::nullopt;
    const auto count = io::read_le<std::uint64_t>(is);
    const std::size_t expected = static_cast<std::size_t>(t.num_offsets()) * t.rows_ * kSymComponents *
                                 static_cast<std::size_t>(t.space_->num_basis());
    if (count != expected) return std::nullopt;
    t.data_.resize(expected);
    io::read_doubles(is, t.data_.data(), expected);
  } catch (const std::runtime_error&) {
    return std::nullopt;
  }
  return t;
}

ConvolutionTable ConvolutionTable::load_or_compute(const std::filesystem::path& path, SpacePtr space,
                                                   KernelSpec spec, int quad_order, bool* loaded) {
  if (auto t = load(path, space, spec, quad_order)) {
    if (loaded) *loaded = true;
    return std::move(*t);
  }
  if (loaded) *loaded = false;
  ConvolutionTable t(std::move(space), spec, quad_order);
  t.save(path);
  return t;
}

// ---------------------------------------------------------------------------
// ConvolutionCoefficients

ConvolutionCoefficients::ConvolutionCoefficients(std::shared_ptr<const ConvolutionTable> table)
    : table_(std::move(table)) {}

CoefficientFields ConvolutionCoefficients::evaluate(const DgField& f, const VecDgField& grad) const {
  const DgSpace& s = table_->space();
  check_space(s, f);
  check_space(s, grad[0]);
  const CartesianMesh& mesh = s.mesh();
  const int ne = s.num_elements();
  const int nb = s.num_basis();
  const int nv = s.num_volume_nodes();
  const int nf = s.num_face_nodes();

  std::vector<BasisColumns> sources(static_cast<std::size_t>(ne), BasisColumns(nb, 4));
  std::vector<Index3> index(static_cast<std::size_t>(ne));
  for (int e = 0; e < ne; ++e) {
    sources[e].col(0) = f.element(e).transpose();
    for (int d = 0; d < 3; ++d) sources[e].col(1 + d) = grad[d].element(e).transpose();
    index[e] = mesh.element_index(e);
  }

  CoefficientFields out;
  out.diffusion.resize(ne * nv, kSymComponents);
  out.advection.resize(ne * nv, 3);
  out.face_advection.resize(mesh.num_faces() * nf, 3);

#pragma omp parallel for schedule(static)
  for (int ep = 0; ep < ne; ++ep) {
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(nv * kSymComponents, 4);
    for (int eq = 0; eq < ne; ++eq)
      acc.noalias() += table_->block(table_->offset_index(minus(index[eq], index[ep])), 0, nv) * sources[eq];
    for (int a = 0; a < nv; ++a) {
      const int row = ep * nv + a;
      for (int c = 0; c < kSymComponents; ++c) out.diffusion(row, c) = acc(a * 6 + c, 0);
      for (int r = 0; r < 3; ++r) {
        double u = 0.0;
        for (int c = 0; c < 3; ++c) u += acc(a * 6 + kSymIndex[r][c], 1 + c);
        out.advection(row, r) = u;
      }
    }
  }

  const int nfaces = mesh.num_faces();
#pragma omp parallel for schedule(static)
  for (int id = 0; id < nfaces; ++id) {
    const Face& fc = mesh.face(id);
    const int row0 = table_->face_row(fc.axis);
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(nf * kSymComponents, 3);
    for (int eq = 0; eq < ne; ++eq)
      acc.noalias() += table_->block(table_->offset_index(minus(index[eq], fc.anchor)), row0, nf) *
                       sources[eq].rightCols<3>();
    for (int j = 0; j < nf; ++j)
      for (int r = 0; r < 3; ++r) {
        double u = 0.0;
        for (int c = 0; c < 3; ++c) u += acc(j * 6 + kSymIndex[r][c], c);
        out.face_advection(id * nf + j, r) = u;
      }
  }

  contractions_ += (static_cast<std::uint64_t>(ne) * ne * nv + static_cast<std::uint64_t>(nfaces) * ne * nf) * nb;
  return out;
}

const std::vector<double>& ConvolutionCoefficients::divergence_table() const {
  std::call_once(div_once_, [this] {
    const DgSpace& s = table_->space();
    const int n = s.mesh().cells();
    const double h = s.mesh().width();
    const int nb = s.num_basis();
    const int nv = s.num_volume_nodes();
    const auto rule = gauss_legendre<double>(table_->quad_order());
    const int m = rule.order();
    const int nq = m * m * m;
    std::vector<Vec3> q_local(static_cast<std::size_t>(nq));
    Eigen::VectorXd q_weight(nq);
    Eigen::MatrixXd q_basis(nq, nb);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        for (int k = 0; k < m; ++k) {
          const int q = (i * m + j) * m + k;
          const Vec3 eta(rule.nodes[i], rule.nodes[j], rule.nodes[k]);
          q_local[q] = 0.5 * h * eta;
          q_weight[q] = rule.weights[i] * rule.weights[j] * rule.weights[k] * 0.125 * h * h * h;
          q_basis.row(q) = s.basis_scale() * s.basis().values(eta).transpose();
        }
    const int side = 2 * n;
    const int offsets = side * side * side;
    const std::size_t block_size = static_cast<std::size_t>(nv) * 3 * nb;
    div_data_.assign(offsets * block_size, 0.0);
    const double gamma = table_->kernel().gamma;
#pragma omp parallel for schedule(dynamic)
    for (int o = 0; o < offsets; ++o) {
      const Vec3 center(h * (o / (side * side) - n), h * ((o / side) % side - n), h * (o % side - n));
      Eigen::MatrixXd kq(nv * 3, nq);
      for (int a = 0; a < nv; ++a) {
        const Vec3 x = 0.5 * h * s.volume_reference_node(a);
        for (int q = 0; q < nq; ++q) {
          const Vec3 d = x - (center + q_local[q]);
          const double lam = gamma == 0.0 ? 1.0 : std::pow(d.squaredNorm(), 0.5 * gamma);
          kq.block<3, 1>(a * 3, q) = -2.0 * q_weight[q] * lam * d;
        }
      }
      Eigen::Map<RowMatrix> out(div_data_.data() + o * block_size, nv * 3, nb);
      out.noalias() = kq * q_basis;
    }
  });
  return div_data_;
}

Eigen::VectorXd ConvolutionCoefficients::advection_divergence(const VecDgField& grad) const {
  const DgSpace& s = table_->space();
  check_space(s, grad[0]);
  const std::vector<double>& data = divergence_table();
  const CartesianMesh& mesh = s.mesh();
  const int ne = s.num_elements();
  const int nb = s.num_basis();
  const int nv = s.num_volume_nodes();
  const std::size_t block_size = static_cast<std::size_t>(nv) * 3 * nb;

  std::vector<Eigen::Matrix<double, Eigen::Dynamic, 3>> sources(static_cast<std::size_t>(ne),
                                                                Eigen::Matrix<double, Eigen::Dynamic, 3>(nb, 3));
  std::vector<Index3> index(static_cast<std::size_t>(ne));
  for (int e = 0; e < ne; ++e) {
    for (int d = 0; d < 3; ++d) sources[e].col(d) = grad[d].element(e).transpose();
    index[e] = mesh.element_index(e);
  }
  Eigen::VectorXd div(ne * nv);
#pragma omp parallel for schedule(static)
  for (int ep = 0; ep < ne; ++ep) {
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(nv * 3, 3);
    for (int eq = 0; eq < ne; ++eq) {
      const int o = table_->offset_index(minus(index[eq], index[ep]));
      Eigen::Map<const RowMatrix> blk(data.data() + o * block_size, nv * 3, nb);
      acc.noalias() += blk * sources[eq];
    }
    for (int a = 0; a < nv; ++a) div[ep * nv + a] = acc(a * 3, 0) + acc(a * 3 + 1, 1) + acc(a * 3 + 2, 2);
  }
  return div;
}

// ---------------------------------------------------------------------------
// DirectCoefficients

DirectCoefficients::DirectCoefficients(SpacePtr space, KernelSpec spec, std::shared_ptr<const EnergyField> energy)
    : space_(std::move(space)), spec_(spec), energy_(std::move(energy)) {
  spec_.validate();
  if (energy_->model() != spec_.model) throw std::invalid_argument("energy field model differs from kernel model");
  const int ne = space_->num_elements();
  const int nv = space_->num_volume_nodes();
  q_pos_.reserve(static_cast<std::size_t>(ne * nv));
  q_weight_.resize(ne * nv);
  for (int e = 0; e < ne; ++e)
    for (int a = 0; a < nv; ++a) {
      q_pos_.push_back(space_->volume_node(e, a));
      q_weight_[e * nv + a] = space_->volume_weights()[a];
    }
}

CoefficientFields DirectCoefficients::evaluate(const DgField& f, const VecDgField& grad) const {
  const DgSpace& s = *space_;
  check_space(s, f);
  check_space(s, grad[0]);
  const int ne = s.num_elements();
  const int nv = s.num_volume_nodes();
  const int nf = s.num_face_nodes();
  const int nq = ne * nv;
  const int nfaces = s.mesh().num_faces();

  Eigen::VectorXd wf(nq);
  Eigen::Matrix<double, Eigen::Dynamic, 3> wg(nq, 3);
  {
    const RowMatrix fv = volume_values(f);
    for (int i = 0; i < nq; ++i) wf[i] = q_weight_[i] * fv.data()[i];
    for (int d = 0; d < 3; ++d) {
      const RowMatrix gv = volume_values(grad[d]);
      for (int i = 0; i < nq; ++i) wg(i, d) = q_weight_[i] * gv.data()[i];
    }
  }
  const RowMatrix& vq = energy_->volume_velocity();

  auto accumulate = [&](const Vec3& p, const Vec3& vp, Mat3* dsum, Vec3& usum) {
    Mat3 dacc = Mat3::Zero();
    Vec3 uacc = Vec3::Zero();
    for (int q = 0; q < nq; ++q) {
      const Mat3 phi = kernel_scalar(spec_, p, q_pos_[q]) * s_tensor(spec_.model, vp, vq.row(q).transpose());
      if (dsum) dacc += wf[q] * phi;
      uacc += phi * wg.row(q).transpose();
    }
    if (dsum) *dsum = dacc;
    usum = uacc;
  };

  CoefficientFields out;
  out.diffusion.resize(nq, kSymComponents);
  out.advection.resize(nq, 3);
  out.face_advection.resize(nfaces * nf, 3);

#pragma omp parallel for schedule(dynamic)
  for (int row = 0; row < nq; ++row) {
    Mat3 d;
    Vec3 u;
    accumulate(q_pos_[row], vq.row(row).transpose(), &d, u);
    out.diffusion(row, 0) = d(0, 0);
    out.diffusion(row, 1) = d(1, 1);
    out.diffusion(row, 2) = d(2, 2);
    out.diffusion(row, 3) = 0.5 * (d(0, 1) + d(1, 0));
    out.diffusion(row, 4) = 0.5 * (d(0, 2) + d(2, 0));
    out.diffusion(row, 5) = 0.5 * (d(1, 2) + d(2, 1));
    out.advection.row(row) = u.transpose();
  }
  const RowMatrix& vface = energy_->face_velocity();
#pragma omp parallel for schedule(dynamic)
  for (int row = 0; row < nfaces * nf; ++row) {
    Vec3 u;
    accumulate(s.face_node(row / nf, row % nf), vface.row(row).transpose(), nullptr, u);
    out.face_advection.row(row) = u.transpose();
  }
  contractions_ += static_cast<std::uint64_t>(nq + nfaces * nf) * nq;
  return out;
}

Eigen::VectorXd DirectCoefficients::advection_divergence(const VecDgField& grad) const {
  if (spec_.model != KineticModel::nonrelativistic)
    throw std::invalid_argument("advection divergence is only available for the nonrelativistic kernel");
  const DgSpace& s = *space_;
  check_space(s, grad[0]);
  const int nq = s.num_elements() * s.num_volume_nodes();
  Eigen::Matrix<double, Eigen::Dynamic, 3> wg(nq, 3);
  for (int d = 0; d < 3; ++d) {
    const RowMatrix gv = volume_values(grad[d]);
    for (int i = 0; i < nq; ++i) wg(i, d) = q_weight_[i] * gv.data()[i];
  }
  Eigen::VectorXd div(nq);
#pragma omp parallel for schedule(dynamic)
  for (int row = 0; row < nq; ++row) {
    double acc = 0.0;
    for (int q = 0; q < nq; ++q) {
      const Vec3 r = q_pos_[row] - q_pos_[q];
      acc += -2.0 * kernel_scalar(spec_, q_pos_[row], q_pos_[q]) * r.dot(wg.row(q).transpose());
    }
    div[row] = acc;
  }
  return div;
}

}  // namespace fpl
