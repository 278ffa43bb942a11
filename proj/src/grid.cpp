#include "chemobound/grid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace chemobound {

GridSpec::GridSpec(int dim, std::array<int, 3> cells, std::array<double, 3> lengths)
    : dim_(dim), cells_{1, 1, 1}, lengths_{1.0, 1.0, 1.0}, spacing_{1.0, 1.0, 1.0} {
    if (dim < 1 || dim > 3) {
        throw std::invalid_argument("grid: dim must be 1, 2 or 3");
    }
    size_ = 1;
    volume_ = 1.0;
    for (int a = 0; a < dim; ++a) {
        if (cells[a] < 3) {
            std::ostringstream msg;
            msg << "grid: cells[" << a << "] = " << cells[a] << " violates n_i >= 3";
            throw std::invalid_argument(msg.str());
        }
        if (!(lengths[a] > 0.0) || !std::isfinite(lengths[a])) {
            std::ostringstream msg;
            msg << "grid: lengths[" << a << "] must be positive and finite";
            throw std::invalid_argument(msg.str());
        }
        cells_[a] = cells[a];
        lengths_[a] = lengths[a];
        spacing_[a] = lengths[a] / cells[a];
        strides_[a] = size_;
        size_ *= static_cast<std::size_t>(cells[a]);
        volume_ *= spacing_[a];
    }
    for (int a = dim; a < 3; ++a) strides_[a] = size_;
}

GridSpec GridSpec::line(int n, double length) { return GridSpec(1, {n, 1, 1}, {length, 1.0, 1.0}); }

GridSpec GridSpec::square(int n, double length) { return GridSpec(2, {n, n, 1}, {length, length, 1.0}); }

GridSpec GridSpec::cube(int n, double length) { return GridSpec(3, {n, n, n}, {length, length, length}); }

double GridSpec::domain_volume() const {
    double v = 1.0;
    for (int a = 0; a < dim_; ++a) v *= lengths_[a];
    return v;
}

std::size_t GridSpec::face_count(int axis) const {
    return size_ / static_cast<std::size_t>(cells_[axis]) * static_cast<std::size_t>(cells_[axis] + 1);
}

std::array<int, 3> GridSpec::multi_index(std::size_t cell) const {
    std::array<int, 3> idx{0, 0, 0};
    for (int a = 0; a < dim_; ++a) {
        idx[a] = static_cast<int>(cell % static_cast<std::size_t>(cells_[a]));
        cell /= static_cast<std::size_t>(cells_[a]);
    }
    return idx;
}

std::array<double, 3> GridSpec::cell_center(std::size_t cell) const {
    const auto idx = multi_index(cell);
    std::array<double, 3> x{0.0, 0.0, 0.0};
    for (int a = 0; a < dim_; ++a) x[a] = center(a, idx[a]);
    return x;
}

bool GridSpec::operator==(const GridSpec& other) const {
    return dim_ == other.dim_ && cells_ == other.cells_ && lengths_ == other.lengths_;
}

Field::Field(const GridSpec& spec, double value) : spec_(spec), values_(spec.size(), value) {}

Field::Field(const GridSpec& spec, std::vector<double> values) : spec_(spec), values_(std::move(values)) {
    if (values_.size() != spec_.size()) {
        throw std::invalid_argument("field: value count does not match grid size");
    }
}

double Field::min() const { return *std::min_element(values_.begin(), values_.end()); }

double Field::max() const { return *std::max_element(values_.begin(), values_.end()); }

bool Field::all_finite() const {
    return std::all_of(values_.begin(), values_.end(), [](double x) { return std::isfinite(x); });
}

FaceField::FaceField(const GridSpec& spec) : spec_(spec) {
    for (int a = 0; a < spec.dim(); ++a) faces_[a].assign(spec.face_count(a), 0.0);
}

double FaceField::max_abs(int axis) const {
    double m = 0.0;
    for (double g : faces_[axis]) m = std::max(m, std::abs(g));
    return m;
}

bool FaceField::boundary_is_zero() const {
    bool ok = true;
    for (int a = 0; a < spec_.dim(); ++a) {
        const std::size_t n = static_cast<std::size_t>(spec_.cells(a));
        const std::size_t s = spec_.stride(a);
        for_each_line(spec_, a, [&](std::size_t, std::size_t f0) {
            ok = ok && faces_[a][f0] == 0.0 && faces_[a][f0 + n * s] == 0.0;
        });
    }
    return ok;
}

FaceField grad_faces(const Field& f) {
    const GridSpec& spec = f.spec();
    FaceField g(spec);
    for (int a = 0; a < spec.dim(); ++a) {
        const std::size_t n = static_cast<std::size_t>(spec.cells(a));
        const std::size_t s = spec.stride(a);
        const double inv_h = 1.0 / spec.spacing(a);
        auto& ga = g.axis(a);
        for_each_line(spec, a, [&](std::size_t c0, std::size_t f0) {
            for (std::size_t k = 1; k < n; ++k) {
                ga[f0 + k * s] = (f[c0 + k * s] - f[c0 + (k - 1) * s]) * inv_h;
            }
        });
    }
    return g;
}

Field div_faces(const FaceField& g) {
    const GridSpec& spec = g.spec();
    Field out(spec, 0.0);
    for (int a = 0; a < spec.dim(); ++a) {
        const std::size_t n = static_cast<std::size_t>(spec.cells(a));
        const std::size_t s = spec.stride(a);
        const double inv_h = 1.0 / spec.spacing(a);
        const auto& ga = g.axis(a);
        for_each_line(spec, a, [&](std::size_t c0, std::size_t f0) {
            for (std::size_t k = 0; k < n; ++k) {
                out[c0 + k * s] += (ga[f0 + (k + 1) * s] - ga[f0 + k * s]) * inv_h;
            }
        });
    }
    return out;
}

Field laplacian_neumann(const Field& f) {
    const GridSpec& spec = f.spec();
    Field out(spec, 0.0);
    for (int a = 0; a < spec.dim(); ++a) {
        const std::size_t n = static_cast<std::size_t>(spec.cells(a));
        const std::size_t s = spec.stride(a);
        const double inv_h = 1.0 / spec.spacing(a);
        for_each_line(spec, a, [&](std::size_t c0, std::size_t) {
            for (std::size_t k = 1; k < n; ++k) {
                const std::size_t lo = c0 + (k - 1) * s;
                const std::size_t hi = lo + s;
                const double flux = (f[hi] - f[lo]) * inv_h;
                out[lo] += flux * inv_h;
                out[hi] -= flux * inv_h;
            }
        });
    }
    return out;
}

double integrate(const Field& f) {
    double sum = 0.0;
    for (double x : f.values()) sum += x;
    return sum * f.spec().cell_volume();
}

double face_energy(const FaceField& g) {
    double sum = 0.0;
    for (int a = 0; a < g.spec().dim(); ++a) {
        for (double x : g.axis(a)) sum += x * x;
    }
    return sum * g.spec().cell_volume();
}

Field cell_gradient_norm(const FaceField& g) {
    const GridSpec& spec = g.spec();
    Field sq(spec, 0.0);
    for (int a = 0; a < spec.dim(); ++a) {
        const std::size_t n = static_cast<std::size_t>(spec.cells(a));
        const std::size_t s = spec.stride(a);
        const auto& ga = g.axis(a);
        for_each_line(spec, a, [&](std::size_t c0, std::size_t f0) {
            for (std::size_t k = 0; k < n; ++k) {
                const double avg = 0.5 * (ga[f0 + k * s] + ga[f0 + (k + 1) * s]);
                sq[c0 + k * s] += avg * avg;
            }
        });
    }
    for (auto& x : sq.values()) x = std::sqrt(x);
    return sq;
}

}  // namespace chemobound
