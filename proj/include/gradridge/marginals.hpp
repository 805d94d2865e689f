#pragma once

#include <string>
#include <vector>

#include "gradridge/polybasis.hpp"

namespace gradridge {

/// Input marginal descriptor. Every marginal is represented by a reference
/// variable (standard normal or uniform on [-1,1]) plus the transform to
/// physical coordinates; training and evaluation happen in reference space.
struct Marginal {
    enum class Kind { Normal, Uniform, LogNormal };

    Kind kind = Kind::Normal;
    double p1 = 0.0;  // normal: mean;  uniform: lower;  lognormal: mu of log
    double p2 = 1.0;  // normal: std;   uniform: upper;  lognormal: sigma of log

    Family reference_family() const {
        return kind == Kind::Uniform ? Family::LegendreUniform : Family::HermiteProbabilist;
    }

    double to_physical(double z) const;
    double d_physical(double z) const;   // d(physical)/dz
    double from_physical(double x) const;

    static Marginal standard_normal() { return {Kind::Normal, 0.0, 1.0}; }
    static Marginal normal(double mean, double stddev) { return {Kind::Normal, mean, stddev}; }
    static Marginal uniform(double lo, double hi) { return {Kind::Uniform, lo, hi}; }
    static Marginal lognormal(double mu, double sigma) { return {Kind::LogNormal, mu, sigma}; }
};

std::string marginal_kind_name(Marginal::Kind kind);
Marginal::Kind marginal_kind_from_name(const std::string& name);

std::vector<Family> reference_families(const std::vector<Marginal>& marginals);

/// d standard-normal marginals (the default when none are specified).
std::vector<Marginal> standard_normal_marginals(int d);

}  // namespace gradridge
