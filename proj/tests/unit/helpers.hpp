#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "gbsval/gaussian_input.hpp"

namespace testing {

inline std::filesystem::path fresh_dir(const std::string& name)
{
    const auto dir = std::filesystem::path(GBSVAL_TEST_TMP) / name;
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

inline std::string slurp(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void spit(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    out << text;
}

inline gbsval::InputModel pure(std::size_t modes, double r)
{
    gbsval::InputModel m;
    m.r.assign(modes, r);
    return m;
}

inline gbsval::InputModel squashed(std::size_t modes, double n)
{
    gbsval::InputModel m;
    m.r.assign(modes, gbsval::squeezing_for_photon_number(n));
    m.family = gbsval::StateFamily::Squashed;
    return m;
}

// |x - expected| in units of err.
inline double pull(double x, double expected, double err)
{
    return std::abs(x - expected) / err;
}

} // namespace testing
