#pragma once

/// @file grid.hpp
/// @brief Cell-centered Cartesian grids on boxes with zero-flux boundaries.
///
/// Cells are stored with axis 0 varying fastest. Faces normal to axis a are
/// indexed the same way, except that the axis-a coordinate runs over
/// 0..n_a (n_a + 1 faces per line); faces 0 and n_a lie on the boundary.

#include <array>
#include <cstddef>
#include <vector>

namespace chemobound {

class GridSpec {
public:
    GridSpec() = default;

    /// Throws std::invalid_argument unless dim in {1,2,3}, n_i >= 3, L_i > 0.
    GridSpec(int dim, std::array<int, 3> cells, std::array<double, 3> lengths);

    static GridSpec line(int n, double length = 1.0);
    static GridSpec square(int n, double length = 1.0);
    static GridSpec cube(int n, double length = 1.0);

    int dim() const { return dim_; }
    int cells(int axis) const { return cells_[axis]; }
    double length(int axis) const { return lengths_[axis]; }
    double spacing(int axis) const { return spacing_[axis]; }
    const std::array<int, 3>& cell_counts() const { return cells_; }
    const std::array<double, 3>& lengths() const { return lengths_; }

    std::size_t size() const { return size_; }
    double cell_volume() const { return volume_; }
    double domain_volume() const;

    /// Distance between consecutive cells along `axis` in the linear index.
    std::size_t stride(int axis) const { return strides_[axis]; }
    std::size_t face_count(int axis) const;

    /// Center coordinate of cell index i along `axis`.
    double center(int axis, int i) const { return (i + 0.5) * spacing_[axis]; }
    std::array<int, 3> multi_index(std::size_t cell) const;
    std::array<double, 3> cell_center(std::size_t cell) const;

    bool operator==(const GridSpec& other) const;
    bool operator!=(const GridSpec& other) const { return !(*this == other); }

private:
    int dim_ = 1;
    std::array<int, 3> cells_{3, 1, 1};
    std::array<double, 3> lengths_{1.0, 1.0, 1.0};
    std::array<double, 3> spacing_{1.0 / 3.0, 1.0, 1.0};
    std::array<std::size_t, 3> strides_{1, 3, 3};
    std::size_t size_ = 3;
    double volume_ = 1.0 / 3.0;
};

/// Visits every grid line parallel to `axis`. The callback receives the
/// linear index of the first cell and the first face of the line; cells
/// advance by spec.stride(axis), faces by the same stride.
template <class Fn>
void for_each_line(const GridSpec& spec, int axis, Fn&& fn) {
    const std::size_t low = spec.stride(axis);
    const std::size_t n = static_cast<std::size_t>(spec.cells(axis));
    std::size_t high = 1;
    for (int a = axis + 1; a < spec.dim(); ++a) high *= static_cast<std::size_t>(spec.cells(a));
    for (std::size_t j = 0; j < high; ++j) {
        for (std::size_t i = 0; i < low; ++i) {
            fn(i + low * n * j, i + low * (n + 1) * j);
        }
    }
}

/// Cell-centered scalar field.
class Field {
public:
    Field() = default;
    explicit Field(const GridSpec& spec, double value = 0.0);
    Field(const GridSpec& spec, std::vector<double> values);

    const GridSpec& spec() const { return spec_; }
    std::size_t size() const { return values_.size(); }

    double& operator[](std::size_t i) { return values_[i]; }
    double operator[](std::size_t i) const { return values_[i]; }
    std::vector<double>& values() { return values_; }
    const std::vector<double>& values() const { return values_; }

    double min() const;
    double max() const;
    bool all_finite() const;

private:
    GridSpec spec_;
    std::vector<double> values_;
};

/// Face-centered normal components, one array per axis.
class FaceField {
public:
    FaceField() = default;
    explicit FaceField(const GridSpec& spec);

    const GridSpec& spec() const { return spec_; }
    std::vector<double>& axis(int a) { return faces_[a]; }
    const std::vector<double>& axis(int a) const { return faces_[a]; }

    /// Largest |value| on the faces normal to `axis`.
    double max_abs(int axis) const;
    /// True when every boundary face carries exactly zero.
    bool boundary_is_zero() const;

private:
    GridSpec spec_;
    std::array<std::vector<double>, 3> faces_;
};

/// Interior faces: (f_right - f_left) / h. Boundary faces: 0.
FaceField grad_faces(const Field& f);

/// Per-cell divergence (g_{k+1} - g_k) / h summed over axes.
Field div_faces(const FaceField& g);

/// div_faces(grad_faces(f)) evaluated directly.
Field laplacian_neumann(const Field& f);

/// Midpoint rule: sum of values times cell volume.
double integrate(const Field& f);

/// Sum over all faces of g^2 times the cell volume.
double face_energy(const FaceField& g);

/// Cell-centered gradient vector norm, averaging the two faces per axis.
Field cell_gradient_norm(const FaceField& g);

}  // namespace chemobound
