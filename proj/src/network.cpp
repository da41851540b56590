#include "gbsval/network.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>

#include "gbsval/errors.hpp"
#include "gbsval/kernels.hpp"
#include "gbsval/rng.hpp"

namespace gbsval {

TransmissionMatrix::TransmissionMatrix(Eigen::MatrixXcd elements, double t_scale)
    : elements_(std::move(elements)), t_scale_(t_scale)
{
    if (!(t_scale_ > 0.0) || !std::isfinite(t_scale_)) {
        throw ConfigError("transmission scale must be positive and finite");
    }
    if (!elements_.allFinite()) {
        throw NumericalError("transmission matrix has non-finite entries");
    }
    const double smax = max_singular_value();
    if (smax > 1.0 + kUnitarityTolerance) {
        std::ostringstream msg;
        msg << "transmission matrix is not sub-unitary: largest singular value " << std::setprecision(10)
            << smax;
        throw NumericalError(msg.str());
    }
}

TransmissionMatrix TransmissionMatrix::identity(std::size_t modes)
{
    const auto n = static_cast<Eigen::Index>(modes);
    return TransmissionMatrix(Eigen::MatrixXcd::Identity(n, n));
}

double TransmissionMatrix::max_singular_value() const
{
    if (elements_.size() == 0) {
        return 0.0;
    }
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(effective());
    return svd.singularValues()(0);
}

bool TransmissionMatrix::is_unitary(double tol) const
{
    if (outputs() != inputs()) {
        return false;
    }
    const Eigen::MatrixXcd m = effective();
    const Eigen::MatrixXcd gram = m.adjoint() * m;
    const auto n = static_cast<Eigen::Index>(inputs());
    return (gram - Eigen::MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff() <= tol;
}

bool TransmissionMatrix::is_identity(double tol) const
{
    if (outputs() != inputs()) {
        return false;
    }
    const auto n = static_cast<Eigen::Index>(inputs());
    return (effective() - Eigen::MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff() <= tol;
}

TransmissionMatrix TransmissionMatrix::rescaled(double factor) const
{
    return TransmissionMatrix(elements_, t_scale_ * factor);
}

TransmissionMatrix parse_matrix(std::istream& in)
{
    std::string line;
    bool transpose = false;
    long long rows = -1;
    long long cols = -1;
    std::size_t line_no = 0;
    std::vector<double> numbers;
    while (std::getline(in, line)) {
        ++line_no;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) {
            continue;
        }
        if (line[first] == '#') {
            std::istringstream directive(line.substr(first + 1));
            std::string word;
            if (directive >> word && word == "transpose") {
                transpose = true;
            }
            continue;
        }
        std::istringstream ls(line);
        if (rows < 0) {
            std::string extra;
            if (!(ls >> rows >> cols) || rows <= 0 || cols <= 0 || (ls >> extra)) {
                throw DataError("matrix line " + std::to_string(line_no) +
                                ": header must be two positive integers 'rows cols'");
            }
            continue;
        }
        std::string token;
        while (ls >> token) {
            std::size_t used = 0;
            double value = 0.0;
            try {
                value = std::stod(token, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used != token.size()) {
                throw DataError("matrix line " + std::to_string(line_no) + ": invalid number '" + token + "'");
            }
            if (!std::isfinite(value)) {
                throw DataError("matrix line " + std::to_string(line_no) + ": non-finite entry");
            }
            numbers.push_back(value);
        }
    }
    if (rows < 0) {
        throw DataError("matrix file has no header");
    }
    const auto expected = static_cast<std::size_t>(rows * cols);
    if (numbers.size() != 2 * expected) {
        throw DataError("matrix declares " + std::to_string(rows) + "x" + std::to_string(cols) + " = " +
                        std::to_string(expected) + " complex entries but contains " +
                        std::to_string(numbers.size() / 2) +
                        (numbers.size() % 2 ? " and a dangling real part" : ""));
    }
    Eigen::MatrixXcd m(rows, cols);
    for (long long i = 0; i < rows; ++i) {
        for (long long j = 0; j < cols; ++j) {
            const std::size_t at = 2 * static_cast<std::size_t>(i * cols + j);
            m(i, j) = {numbers[at], numbers[at + 1]};
        }
    }
    if (transpose) {
        m.transposeInPlace();
    }
    return TransmissionMatrix(std::move(m));
}

TransmissionMatrix load_matrix(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open matrix file " + path.string());
    }
    return parse_matrix(in);
}

void save_matrix(const std::filesystem::path& path, const TransmissionMatrix& matrix)
{
    std::ofstream out(path);
    if (!out) {
        throw DataError("cannot write matrix file " + path.string());
    }
    const Eigen::MatrixXcd m = matrix.effective();
    out << m.rows() << ' ' << m.cols() << '\n' << std::setprecision(17);
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            out << (j ? " " : "") << m(i, j).real() << ' ' << m(i, j).imag();
        }
        out << '\n';
    }
}

AmplitudeEnsemble apply_network(const TransmissionMatrix& matrix, const AmplitudeEnsemble& ens)
{
    if (matrix.inputs() != ens.modes()) {
        throw DataError("network has " + std::to_string(matrix.inputs()) + " inputs but ensemble has " +
                        std::to_string(ens.modes()) + " modes");
    }
    if (ens.ordering != Ordering::Normal && !matrix.is_unitary()) {
        throw NumericalError("symmetric and anti-normal orderings require a unitary network");
    }
    const Eigen::MatrixXcd t = matrix.effective();
    AmplitudeEnsemble out;
    out.ordering = ens.ordering;
    out.n_s = ens.n_s;
    out.n_r = ens.n_r;
    out.classical = ens.classical;
    out.alpha.resize(t.rows(), ens.alpha.cols());
    out.beta.resize(t.rows(), ens.beta.cols());
    kernels::transform_parallel(t, ens.alpha, out.alpha);
    kernels::transform_parallel(t.conjugate(), ens.beta, out.beta);
    return out;
}

void validate_permutation(std::span<const std::size_t> perm, std::size_t n)
{
    if (perm.size() != n) {
        throw ConfigError("permutation has " + std::to_string(perm.size()) + " entries, expected " +
                          std::to_string(n));
    }
    std::vector<bool> seen(n, false);
    for (std::size_t p : perm) {
        if (p >= n || seen[p]) {
            throw ConfigError("permutation is not a bijection");
        }
        seen[p] = true;
    }
}

std::vector<std::size_t> inverse_permutation(std::span<const std::size_t> perm)
{
    validate_permutation(perm, perm.size());
    std::vector<std::size_t> inv(perm.size());
    for (std::size_t i = 0; i < perm.size(); ++i) {
        inv[perm[i]] = i;
    }
    return inv;
}

TransmissionMatrix permute_outputs(const TransmissionMatrix& matrix, std::span<const std::size_t> perm)
{
    validate_permutation(perm, matrix.outputs());
    Eigen::MatrixXcd m(matrix.elements().rows(), matrix.elements().cols());
    for (std::size_t i = 0; i < perm.size(); ++i) {
        m.row(static_cast<Eigen::Index>(i)) = matrix.elements().row(static_cast<Eigen::Index>(perm[i]));
    }
    return TransmissionMatrix(std::move(m), matrix.t_scale());
}

Eigen::MatrixXcd haar_unitary(std::size_t n, std::uint64_t seed)
{
    const auto size = static_cast<Eigen::Index>(n);
    const rng::CounterRng gen(rng::stream_key(seed, "haar"));
    Eigen::MatrixXcd z(size, size);
    for (Eigen::Index i = 0; i < size; ++i) {
        for (Eigen::Index j = 0; j < size; ++j) {
            const auto [a, b] = gen.normal_pair(static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(j));
            z(i, j) = {a, b};
        }
    }
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(z);
    Eigen::MatrixXcd q = qr.householderQ();
    const Eigen::MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index j = 0; j < size; ++j) {
        const std::complex<double> d = r(j, j);
        const double mag = std::abs(d);
        q.col(j) *= mag > 0.0 ? d / mag : 1.0;
    }
    return q;
}

TransmissionMatrix random_lossy_network(std::size_t outputs, std::size_t inputs, double transmission,
                                        std::uint64_t seed)
{
    if (inputs > outputs) {
        throw ConfigError("random network needs inputs <= outputs");
    }
    Eigen::MatrixXcd u = haar_unitary(outputs, seed);
    return TransmissionMatrix(transmission * u.leftCols(static_cast<Eigen::Index>(inputs)));
}

} // namespace gbsval
