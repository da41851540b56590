#include <algorithm>

#include <omp.h>

#include "gbsval/kernels.hpp"

namespace gbsval::kernels {

void set_threads(int threads)
{
    if (threads > 0) {
        omp_set_num_threads(threads);
    }
}

int max_threads()
{
    return omp_get_max_threads();
}

void transform_serial(const Eigen::MatrixXcd& t, Eigen::Ref<const Eigen::MatrixXcd> in,
                      Eigen::Ref<Eigen::MatrixXcd> out)
{
    const Eigen::Index rows = t.rows();
    const Eigen::Index inner = t.cols();
    for (Eigen::Index k = 0; k < in.cols(); ++k) {
        for (Eigen::Index i = 0; i < rows; ++i) {
            std::complex<double> acc = 0.0;
            for (Eigen::Index j = 0; j < inner; ++j) {
                acc += t(i, j) * in(j, k);
            }
            out(i, k) = acc;
        }
    }
}

void transform_parallel(const Eigen::MatrixXcd& t, Eigen::Ref<const Eigen::MatrixXcd> in,
                        Eigen::Ref<Eigen::MatrixXcd> out)
{
    // Column blocks sized so one block of input and output stays cache resident.
    const Eigen::Index block = std::max<Eigen::Index>(64, 32768 / std::max<Eigen::Index>(1, t.rows() + t.cols()));
    const Eigen::Index cols = in.cols();
    const Eigen::Index blocks = (cols + block - 1) / block;
#pragma omp parallel for schedule(static)
    for (Eigen::Index b = 0; b < blocks; ++b) {
        const Eigen::Index first = b * block;
        const Eigen::Index width = std::min(block, cols - first);
        out.middleCols(first, width).noalias() = t * in.middleCols(first, width);
    }
}

} // namespace gbsval::kernels
