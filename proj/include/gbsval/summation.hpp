#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

namespace gbsval {

// Neumaier compensated sum.
class CompensatedSum {
  public:
    void add(double x)
    {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) {
            comp_ += (sum_ - t) + x;
        } else {
            comp_ += (x - t) + sum_;
        }
        sum_ = t;
    }
    void merge(const CompensatedSum& other)
    {
        add(other.sum_);
        comp_ += other.comp_;
    }
    double value() const { return sum_ + comp_; }

  private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

class CompensatedComplexSum {
  public:
    void add(std::complex<double> z)
    {
        re_.add(z.real());
        im_.add(z.imag());
    }
    void merge(const CompensatedComplexSum& other)
    {
        re_.merge(other.re_);
        im_.merge(other.im_);
    }
    std::complex<double> value() const { return {re_.value(), im_.value()}; }

  private:
    CompensatedSum re_;
    CompensatedSum im_;
};

// Element-wise compensated accumulation of complex vectors.
class CompensatedComplexVector {
  public:
    explicit CompensatedComplexVector(std::size_t n = 0) : sums_(n) {}

    std::size_t size() const { return sums_.size(); }
    void add(std::size_t i, std::complex<double> z) { sums_[i].add(z); }
    void merge(const CompensatedComplexVector& other)
    {
        for (std::size_t i = 0; i < sums_.size(); ++i) {
            sums_[i].merge(other.sums_[i]);
        }
    }
    std::vector<std::complex<double>> values() const
    {
        std::vector<std::complex<double>> out(sums_.size());
        for (std::size_t i = 0; i < sums_.size(); ++i) {
            out[i] = sums_[i].value();
        }
        return out;
    }

  private:
    std::vector<CompensatedComplexSum> sums_;
};

} // namespace gbsval
