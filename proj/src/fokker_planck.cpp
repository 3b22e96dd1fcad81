#include "sglab/eval.hpp"

#include <algorithm>
#include <cmath>

namespace sglab {

namespace {

// Face velocities of one axis: u_axis at the interior faces between cell
// `lo` and its successor along the axis. Index follows the lower cell.
struct AxisFaces {
  std::vector<double> u;  // per cell; valid where the cell has an upper neighbour
  double max_abs = 0.0;
};

std::size_t stride_of(const GridSpec& spec, int axis) {
  std::size_t s = 1;
  for (int a = spec.dim() - 1; a > axis; --a) s *= static_cast<std::size_t>(spec.resolution[static_cast<std::size_t>(a)]);
  return s;
}

std::size_t coord_of(const GridSpec& spec, std::size_t index, int axis) {
  return (index / stride_of(spec, axis)) % static_cast<std::size_t>(spec.resolution[static_cast<std::size_t>(axis)]);
}

AxisFaces face_velocities(const GridSpec& spec, int axis, const FokkerPlanckProblem& problem, double t) {
  const std::size_t cells = spec.cell_count();
  const auto n_axis = static_cast<std::size_t>(spec.resolution[static_cast<std::size_t>(axis)]);
  std::vector<std::size_t> owners;
  for (std::size_t i = 0; i < cells; ++i) {
    if (coord_of(spec, i, axis) + 1 < n_axis) owners.push_back(i);
  }
  AxisFaces faces;
  faces.u.assign(cells, 0.0);
  if (owners.empty()) return faces;
  Mat pts(static_cast<Eigen::Index>(owners.size()), spec.dim());
  const double half = 0.5 * spec.cell_width(axis);
  for (std::size_t k = 0; k < owners.size(); ++k) {
    Vec c = spec.center(owners[k]);
    c(axis) += half;
    pts.row(static_cast<Eigen::Index>(k)) = c.transpose();
  }
  const Mat u = problem.velocity(pts, t);
  if (u.rows() != pts.rows() || u.cols() != spec.dim()) throw DimensionError("fokker_planck: velocity has the wrong shape");
  if (!u.allFinite()) throw NumericalError("fokker_planck: non-finite velocity at t = " + std::to_string(t));
  for (std::size_t k = 0; k < owners.size(); ++k) {
    const double v = u(static_cast<Eigen::Index>(k), axis);
    faces.u[owners[k]] = v;
    faces.max_abs = std::max(faces.max_abs, std::abs(v));
  }
  return faces;
}

}  // namespace

DensityGrid fokker_planck_evolve(const DensityGrid& initial, const FokkerPlanckProblem& problem) {
  if (problem.times.size() < 2) return initial;
  if (!problem.velocity || !problem.diffusion) throw std::invalid_argument("fokker_planck: velocity and diffusion required");
  const GridSpec& spec = initial.spec();
  const int dim = spec.dim();
  const std::size_t cells = spec.cell_count();
  std::vector<double> p = initial.values();
  std::vector<double> next(cells);
  const double mass0 = initial.mass();
  double elapsed = 0.0;

  for (std::size_t k = 0; k + 1 < problem.times.size(); ++k) {
    const double t = problem.times[k];
    const double span = t - problem.times[k + 1];
    if (!(span >= 0.0)) throw DomainError("fokker_planck: times must decrease");
    if (span == 0.0) continue;
    std::vector<AxisFaces> faces;
    const double diff = problem.diffusion(t);
    if (!(diff >= 0.0)) throw DomainError("fokker_planck: diffusion must be non-negative");
    double rate = 0.0;
    for (int a = 0; a < dim; ++a) {
      faces.push_back(face_velocities(spec, a, problem, t));
      const double h = spec.cell_width(a);
      rate += faces.back().max_abs / h + 2.0 * diff / (h * h);
    }
    const double dt_max = rate > 0.0 ? problem.cfl / rate : span;
    int sub = problem.substeps;
    if (sub > 0) {
      if (span / sub > dt_max * (1.0 + 1e-12)) {
        throw DomainError("fokker_planck: CFL violated (dt " + std::to_string(span / sub) + " > " +
                          std::to_string(dt_max) + ")");
      }
    } else {
      sub = std::max(1, static_cast<int>(std::ceil(span / dt_max)));
    }
    const double dt = span / sub;

    for (int step = 0; step < sub; ++step) {
      std::fill(next.begin(), next.end(), 0.0);
      for (int a = 0; a < dim; ++a) {
        const std::size_t stride = stride_of(spec, a);
        const auto n_axis = static_cast<std::size_t>(spec.resolution[static_cast<std::size_t>(a)]);
        const double h = spec.cell_width(a);
        const auto& u = faces[static_cast<std::size_t>(a)].u;
        for (std::size_t i = 0; i < cells; ++i) {
          if (coord_of(spec, i, a) + 1 >= n_axis) continue;
          const std::size_t j = i + stride;
          const double adv = u[i] > 0.0 ? u[i] * p[i] : u[i] * p[j];
          const double flux = adv - diff * (p[j] - p[i]) / h;
          next[i] -= flux / h;
          next[j] += flux / h;
        }
      }
      for (std::size_t i = 0; i < cells; ++i) {
        const double v = p[i] + dt * next[i];
        if (v < -1e-12) {
          throw NumericalError("fokker_planck: negative density " + std::to_string(v) + " at t = " + std::to_string(t));
        }
        p[i] = std::max(v, 0.0);
      }
    }
    elapsed += span;
    DensityGrid probe(spec, p);
    if (std::abs(probe.mass() - mass0) > 1e-6 * std::max(1.0, elapsed)) {
      throw NumericalError("fokker_planck: mass drifted to " + std::to_string(probe.mass()));
    }
  }
  return DensityGrid(spec, std::move(p));
}

}  // namespace sglab
