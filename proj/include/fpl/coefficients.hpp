#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <vector>

#include "fpl/collision_kernel.hpp"

namespace fpl {

/// Nonlocal coefficients sampled at quadrature nodes.
struct CoefficientFields {
  RowMatrix diffusion;       ///< (elements * volume nodes) x 6, packed symmetric D_h
  RowMatrix advection;       ///< (elements * volume nodes) x 3, U_h
  RowMatrix face_advection;  ///< (faces * face nodes) x 3, U_h (single-valued)

  Mat3 diffusion_at(int row) const { return unpack_symmetric(diffusion.row(row).data()); }
};

/// Produces D_h[f] and U_h[grad] at all quadrature nodes.
class CoefficientSource {
 public:
  virtual ~CoefficientSource() = default;

  virtual const DgSpace& space() const = 0;
  virtual const KernelSpec& kernel() const = 0;

  /// D_h from `f` and U_h from the discrete-gradient field `grad`, in one sweep.
  virtual CoefficientFields evaluate(const DgField& f, const VecDgField& grad) const = 0;
  /// div U_h at the volume nodes, (elements * volume nodes).
  virtual Eigen::VectorXd advection_divergence(const VecDgField& grad) const = 0;
  /// Velocity mismatch across faces of the underlying kernel (0 when continuous).
  virtual double face_velocity_jump() const { return 0.0; }

  /// Kernel-block contractions performed so far (node x source basis function).
  std::uint64_t contractions() const { return contractions_.load(); }
  void reset_contractions() { contractions_ = 0; }

 protected:
  mutable std::atomic<std::uint64_t> contractions_{0};
};

/// D_h samples at the volume nodes.
RowMatrix eval_diffusion(const CoefficientSource& source, const DgField& f);

struct AdvectionSamples {
  RowMatrix volume;  ///< (elements * volume nodes) x 3
  RowMatrix face;    ///< (faces * face nodes) x 3
};
/// U_h samples at volume and face nodes.
AdvectionSamples eval_advection(const CoefficientSource& source, const VecDgField& grad);

/// Translation-invariant blocks
///   K(offset, node, j) = int_{R_offset} K(x_node - q) phi_j(q) dq
/// of the nonrelativistic kernel K(r) = |r|^gamma (|r|^2 I - r (x) r).
///
/// Target nodes are given relative to an anchor element: the volume nodes,
/// then the nodes of the lower face of each axis. Offsets run over
/// [-n, n-1]^3 (the -n slab is reached only by upper-boundary face anchors),
/// so storage is (2n)^3 blocks. Blocks are stored offset-major: each offset
/// holds a row-major (rows * 6) x basis matrix.
class ConvolutionTable {
 public:
  ConvolutionTable(SpacePtr space, KernelSpec spec, int quad_order = -1);

  const DgSpace& space() const { return *space_; }
  const KernelSpec& kernel() const { return spec_; }
  int quad_order() const { return quad_order_; }

  int rows() const { return rows_; }
  int face_row(int axis) const { return space_->num_volume_nodes() + axis * space_->num_face_nodes(); }
  int offsets_per_axis() const { return 2 * space_->mesh().cells(); }
  int num_offsets() const { int s = offsets_per_axis(); return s * s * s; }
  int offset_index(const Index3& delta) const;

  /// Block for `offset`, rows [row0, row0 + count) as a (count * 6) x basis matrix.
  Eigen::Map<const RowMatrix> block(int offset, int row0, int count) const;
  Mat3 entry(const Index3& delta, int row, int j) const;

  const std::vector<double>& data() const { return data_; }
  std::size_t memory_bytes() const { return data_.size() * sizeof(double); }

  /// Binary cache: header (magic, version, n, k, quad order, gamma, L, count)
  /// followed by raw little-endian doubles in storage order.
  void save(const std::filesystem::path& path) const;
  /// Loads a cache if its header matches; std::nullopt otherwise.
  static std::optional<ConvolutionTable> load(const std::filesystem::path& path, SpacePtr space, KernelSpec spec,
                                              int quad_order = -1);
  /// Loads a matching cache or computes the table and rewrites the cache.
  static ConvolutionTable load_or_compute(const std::filesystem::path& path, SpacePtr space, KernelSpec spec,
                                          int quad_order = -1, bool* loaded = nullptr);

 private:
  struct Uninitialized {};
  ConvolutionTable(Uninitialized, SpacePtr space, KernelSpec spec, int quad_order);
  void compute();

  SpacePtr space_;
  KernelSpec spec_;
  int quad_order_;
  int rows_;
  std::vector<double> data_;
};

/// Coefficient evaluation through the precomputed convolution table.
class ConvolutionCoefficients final : public CoefficientSource {
 public:
  explicit ConvolutionCoefficients(std::shared_ptr<const ConvolutionTable> table);

  const DgSpace& space() const override { return table_->space(); }
  const KernelSpec& kernel() const override { return table_->kernel(); }
  const ConvolutionTable& table() const { return *table_; }

  CoefficientFields evaluate(const DgField& f, const VecDgField& grad) const override;
  Eigen::VectorXd advection_divergence(const VecDgField& grad) const override;

 private:
  // Blocks of the divergence kernel -2 |r|^gamma r at volume nodes, same
  // offset layout as the main table; built on first use.
  const std::vector<double>& divergence_table() const;

  std::shared_ptr<const ConvolutionTable> table_;
  mutable std::once_flag div_once_;
  mutable std::vector<double> div_data_;
};

/// Brute-force double quadrature with the structure-preserving kernel
/// Phi_h(p, q) evaluated from the tabulated discrete velocities. Works for
/// both kinetic models; O(N^2) work per evaluation.
class DirectCoefficients final : public CoefficientSource {
 public:
  DirectCoefficients(SpacePtr space, KernelSpec spec, std::shared_ptr<const EnergyField> energy);

  const DgSpace& space() const override { return *space_; }
  const KernelSpec& kernel() const override { return spec_; }
  const EnergyField& energy() const { return *energy_; }

  CoefficientFields evaluate(const DgField& f, const VecDgField& grad) const override;
  /// Nonrelativistic only: div_p Phi(p, q) = -2 |p - q|^gamma (p - q).
  Eigen::VectorXd advection_divergence(const VecDgField& grad) const override;
  double face_velocity_jump() const override { return energy_->max_face_jump(); }

 private:
  SpacePtr space_;
  KernelSpec spec_;
  std::shared_ptr<const EnergyField> energy_;
  std::vector<Vec3> q_pos_;
  Eigen::VectorXd q_weight_;
};

}  // namespace fpl
