#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "gbsval/gaussian_input.hpp"

namespace gbsval {

inline constexpr double kUnitarityTolerance = 1e-6;

// Linear network, outputs x inputs. The physical matrix is t_scale * elements.
class TransmissionMatrix {
  public:
    TransmissionMatrix() = default;

    // Throws NumericalError if the scaled matrix has a singular value above 1 + 1e-6.
    explicit TransmissionMatrix(Eigen::MatrixXcd elements, double t_scale = 1.0);

    static TransmissionMatrix identity(std::size_t modes);

    const Eigen::MatrixXcd& elements() const { return elements_; }
    double t_scale() const { return t_scale_; }
    Eigen::MatrixXcd effective() const { return t_scale_ * elements_; }

    std::size_t outputs() const { return static_cast<std::size_t>(elements_.rows()); }
    std::size_t inputs() const { return static_cast<std::size_t>(elements_.cols()); }

    double max_singular_value() const;
    bool is_unitary(double tol = kUnitarityTolerance) const;
    bool is_identity(double tol = 1e-12) const;

    // Same matrix with the scale multiplied by `factor`.
    TransmissionMatrix rescaled(double factor) const;

  private:
    Eigen::MatrixXcd elements_;
    double t_scale_ = 1.0;
};

// Text format: optional `#` comment lines (a `# transpose` directive marks
// data stored inputs x outputs), a `rows cols` header, then rows*cols
// `re im` pairs in row-major order.
TransmissionMatrix load_matrix(const std::filesystem::path& path);
TransmissionMatrix parse_matrix(std::istream& in);
void save_matrix(const std::filesystem::path& path, const TransmissionMatrix& matrix);

// alpha' = T alpha, beta' = conj(T) beta per trajectory.
AmplitudeEnsemble apply_network(const TransmissionMatrix& matrix, const AmplitudeEnsemble& ens);

// Row i of the result is row perm[i] of the input.
TransmissionMatrix permute_outputs(const TransmissionMatrix& matrix, std::span<const std::size_t> perm);

void validate_permutation(std::span<const std::size_t> perm, std::size_t n);
std::vector<std::size_t> inverse_permutation(std::span<const std::size_t> perm);

// Haar-random unitary of size n (QR of a complex Ginibre matrix with phase fix).
Eigen::MatrixXcd haar_unitary(std::size_t n, std::uint64_t seed);

// First `inputs` columns of a Haar unitary scaled by `transmission`.
TransmissionMatrix random_lossy_network(std::size_t outputs, std::size_t inputs, double transmission,
                                        std::uint64_t seed);

} // namespace gbsval
