#include "gradridge/bench.hpp"

#include <cmath>
#include <stdexcept>

#include "gradridge/rng.hpp"

namespace gradridge {

double Marginal::to_physical(double z) const {
    switch (kind) {
        case Kind::Normal: return p1 + p2 * z;
        case Kind::Uniform: return 0.5 * (p1 + p2) + 0.5 * (p2 - p1) * z;
        case Kind::LogNormal: return std::exp(p1 + p2 * z);
    }
    throw std::logic_error("Marginal::to_physical");
}

double Marginal::d_physical(double z) const {
    switch (kind) {
        case Kind::Normal: return p2;
        case Kind::Uniform: return 0.5 * (p2 - p1);
        case Kind::LogNormal: return p2 * std::exp(p1 + p2 * z);
    }
    throw std::logic_error("Marginal::d_physical");
}

double Marginal::from_physical(double x) const {
    switch (kind) {
        case Kind::Normal: return (x - p1) / p2;
        case Kind::Uniform: return (2.0 * x - (p1 + p2)) / (p2 - p1);
        case Kind::LogNormal: return (std::log(x) - p1) / p2;
    }
    throw std::logic_error("Marginal::from_physical");
}

std::string marginal_kind_name(Marginal::Kind kind) {
    switch (kind) {
        case Marginal::Kind::Normal: return "normal";
        case Marginal::Kind::Uniform: return "uniform";
        case Marginal::Kind::LogNormal: return "lognormal";
    }
    throw std::logic_error("marginal_kind_name");
}

Marginal::Kind marginal_kind_from_name(const std::string& name) {
    if (name == "normal") return Marginal::Kind::Normal;
    if (name == "uniform") return Marginal::Kind::Uniform;
    if (name == "lognormal") return Marginal::Kind::LogNormal;
    throw std::invalid_argument("unknown marginal kind: " + name);
}

std::vector<Family> reference_families(const std::vector<Marginal>& marginals) {
    std::vector<Family> families;
    families.reserve(marginals.size());
    for (const Marginal& m : marginals) families.push_back(m.reference_family());
    return families;
}

std::vector<Marginal> standard_normal_marginals(int d) {
    return std::vector<Marginal>(static_cast<std::size_t>(d), Marginal::standard_normal());
}

namespace {

void check_gradients(Benchmark& bench, std::uint64_t seed) {
    const CounterRng rng{seed};
    const int d = bench.d;
    Eigen::VectorXd x(d), grad(d), up, down;
    for (int trial = 0; trial < 10; ++trial) {
        for (int j = 0; j < d; ++j) {
            const std::uint64_t ctr = 2 * static_cast<std::uint64_t>(trial * d + j);
            x(j) = bench.marginals[static_cast<std::size_t>(j)].reference_family() ==
                           Family::LegendreUniform
                       ? 0.9 * rng.uniform_sym(ctr)
                       : rng.normal(ctr);
        }
        bench.eval(x, &grad);
        const double h = 1e-6;
        for (int j = 0; j < d; ++j) {
            Eigen::VectorXd xp = x, xm = x;
            xp(j) += h;
            xm(j) -= h;
            const double fd = (bench.eval(xp, nullptr) - bench.eval(xm, nullptr)) / (2 * h);
            const double scale = std::max({1.0, std::abs(fd), std::abs(grad(j))});
            if (std::abs(fd - grad(j)) > 1e-6 * scale)
                throw std::logic_error("benchmark '" + bench.name + "': gradient check failed");
        }
    }
}

}  // namespace

Benchmark make_isotropic(int d) {
    Benchmark bench;
    bench.name = "isotropic";
    bench.d = d;
    bench.marginals = standard_normal_marginals(d);
    bench.eval = [](const Eigen::VectorXd& x, Eigen::VectorXd* grad) {
        const double r = x.norm();
        if (grad) {
            // -sin(r)/r -> -1 as r -> 0, so the gradient vanishes smoothly.
            const double coef = r > 0.0 ? -std::sin(r) / r : -1.0;
            *grad = coef * x;
        }
        return std::cos(r);
    };
    check_gradients(bench, 421);
    return bench;
}

Benchmark make_borehole() {
    Benchmark bench;
    bench.name = "borehole";
    bench.d = 8;
    bench.marginals = {
        Marginal::normal(0.10, 0.0161812),  // r_w, well radius
        Marginal::uniform(63070, 115600),   // T_u, upper aquifer transmissivity
        Marginal::uniform(63.1, 116),       // T_l, lower aquifer transmissivity
        Marginal::uniform(1120, 1680),      // L, borehole length
        Marginal::lognormal(7.71, 1.0056),  // r, radius of influence
        Marginal::uniform(990, 1110),       // H_u, upper aquifer head
        Marginal::uniform(700, 820),        // H_l, lower aquifer head
        Marginal::uniform(9855, 12045),     // K_w, hydraulic conductivity
    };
    const std::vector<Marginal> marg = bench.marginals;
    bench.eval = [marg](const Eigen::VectorXd& z, Eigen::VectorXd* grad) {
        double p[8];
        for (int j = 0; j < 8; ++j) p[j] = marg[static_cast<std::size_t>(j)].to_physical(z(j));
        const double rw = p[0], tu = p[1], tl = p[2], length = p[3], r = p[4];
        const double hu = p[5], hl = p[6], kw = p[7];

        const double lr = std::log(r / rw);
        const double pipe = 2.0 * length * tu / (rw * rw * kw);
        const double denom = lr * (1.0 + tu / tl) + pipe;
        const double numer = 2.0 * M_PI * tu * (hu - hl);
        const double u = numer / denom;

        if (grad) {
            double d_denom[8] = {0, 0, 0, 0, 0, 0, 0, 0};
            d_denom[0] = -(1.0 + tu / tl) / rw - 2.0 * pipe / rw;           // d/d rw
            d_denom[1] = lr / tl + pipe / tu;                                // d/d tu
            d_denom[2] = -lr * tu / (tl * tl);                               // d/d tl
            d_denom[3] = pipe / length;                                      // d/d L
            d_denom[4] = (1.0 + tu / tl) / r;                                // d/d r
            d_denom[7] = -pipe / kw;                                         // d/d kw

            double d_u[8];
            for (int j = 0; j < 8; ++j) d_u[j] = -u * d_denom[j] / denom;
            d_u[1] += u / tu;                   // tu also appears in the numerator
            d_u[5] = 2.0 * M_PI * tu / denom;   // hu
            d_u[6] = -2.0 * M_PI * tu / denom;  // hl

            grad->resize(8);
            for (int j = 0; j < 8; ++j)
                (*grad)(j) = d_u[j] * marg[static_cast<std::size_t>(j)].d_physical(z(j));
        }
        return u;
    };
    check_gradients(bench, 422);
    return bench;
}

Benchmark make_composed16() {
    Benchmark bench;
    bench.name = "composed16";
    bench.d = 16;
    bench.marginals.assign(16, Marginal::uniform(-1.0, 1.0));
    bench.eval = [](const Eigen::VectorXd& x, Eigen::VectorXd* grad) {
        // Complete binary tree in heap order: node i has children 2i+1, 2i+2;
        // nodes 15..30 are the leaves x_0..x_15.
        double val[31];
        for (int j = 0; j < 16; ++j) val[15 + j] = x(j);
        for (int i = 14; i >= 0; --i) {
            const double s = val[2 * i + 1], t = val[2 * i + 2];
            const double b = 1.0 + s * t;
            val[i] = b * b / 9.0;
        }
        if (grad) {
            double adj[31] = {0};
            adj[0] = 1.0;
            for (int i = 0; i <= 14; ++i) {
                const double s = val[2 * i + 1], t = val[2 * i + 2];
                const double b = 2.0 * (1.0 + s * t) / 9.0;
                adj[2 * i + 1] += adj[i] * b * t;
                adj[2 * i + 2] += adj[i] * b * s;
            }
            grad->resize(16);
            for (int j = 0; j < 16; ++j) (*grad)(j) = adj[15 + j];
        }
        return val[0];
    };
    check_gradients(bench, 423);
    return bench;
}

Benchmark benchmark_by_name(const std::string& name) {
    if (name == "isotropic") return make_isotropic();
    if (name == "borehole") return make_borehole();
    if (name == "composed16") return make_composed16();
    throw std::invalid_argument("unknown benchmark: " + name +
                                " (available: isotropic, borehole, composed16)");
}

std::vector<std::string> benchmark_names() { return {"isotropic", "borehole", "composed16"}; }

Sample sample_benchmark(const Benchmark& bench, int n, std::uint64_t seed,
                        const ExecConfig& exec) {
    if (n < 1) throw std::invalid_argument("sample_benchmark: need n >= 1");
    const int d = bench.d;
    const CounterRng rng{seed};

    Sample sample;
    sample.points.resize(n, d);
    sample.values.resize(n);
    sample.gradients.resize(n, d);

    for_indexed(static_cast<std::size_t>(n), exec, [&](std::size_t i) {
        const Eigen::Index pt = static_cast<Eigen::Index>(i);
        Eigen::VectorXd x(d), grad(d);
        for (int j = 0; j < d; ++j) {
            const std::uint64_t ctr = 2 * (static_cast<std::uint64_t>(i) * d + static_cast<std::uint64_t>(j));
            x(j) = bench.marginals[static_cast<std::size_t>(j)].reference_family() ==
                           Family::LegendreUniform
                       ? rng.uniform_sym(ctr)
                       : rng.normal(ctr);
        }
        sample.points.row(pt) = x.transpose();
        sample.values(pt) = bench.eval(x, &grad);
        sample.gradients.row(pt) = grad.transpose();
    });
    return sample;
}

}  // namespace gradridge
