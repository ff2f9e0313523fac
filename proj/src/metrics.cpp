#include "avocado/metrics.hpp"

#include <cmath>
#include <limits>

#include "avocado/pipeline.hpp"
#include "avocado/rng.hpp"

namespace avocado {

double TreResult::mean() const {
    double sum = 0.0;
    int n = 0;
    for (std::size_t i = 0; i < tre.size(); ++i) {
        if (!valid[i]) continue;
        sum += tre[i];
        ++n;
    }
    return n > 0 ? sum / n : std::numeric_limits<double>::quiet_NaN();
}

double TreResult::stddev() const {
    const double m = mean();
    double sum = 0.0;
    int n = 0;
    for (std::size_t i = 0; i < tre.size(); ++i) {
        if (!valid[i]) continue;
        sum += (tre[i] - m) * (tre[i] - m);
        ++n;
    }
    return n > 1 ? std::sqrt(sum / (n - 1)) : 0.0;
}

namespace {

bool inside_grid(const Grid& g, const Vec& p) {
    for (int d = 0; d < g.ndims(); ++d) {
        const double lo = g.origin(d);
        const double hi = g.origin(d) + (g.dim(d) - 1) * g.spacing(d);
        if (p[d] < lo || p[d] > hi) return false;
    }
    return true;
}

void require_binary(const ScalarField& f, const char* what) {
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double v = f[i];
        if (std::abs(v) > 1e-12 && std::abs(v - 1.0) > 1e-12)
            throw DataError(std::string(what) + ": mask is not binary at voxel " + std::to_string(i));
    }
}

}  // namespace

TreResult target_registration_error(const InverseMap& map, const LandmarkSet& validation) {
    TreResult r;
    r.tre.reserve(validation.size());
    r.valid.reserve(validation.size());
    for (const auto& pr : validation.pairs) {
        if (!inside_grid(map.grid(), pr.target)) {
            r.tre.push_back(0.0);
            r.valid.push_back(false);
            continue;
        }
        const Vec deformed = sample_map(map, pr.target);
        r.tre.push_back((deformed - pr.source).norm());
        r.valid.push_back(true);
    }
    return r;
}

double mask_volume(const ScalarField& seg) {
    require_binary(seg, "mask_volume");
    const Grid& g = seg.grid();
    double voxel = 1.0;
    for (int d = 0; d < g.ndims(); ++d) voxel *= g.spacing(d);
    std::size_t count = 0;
    for (std::size_t i = 0; i < seg.size(); ++i)
        if (seg[i] > 0.5) ++count;
    return static_cast<double>(count) * voxel;
}

double dice(const ScalarField& a, const ScalarField& b) {
    require_same_grid(a.grid(), b.grid(), "dice");
    require_binary(a, "dice");
    require_binary(b, "dice");
    std::size_t na = 0, nb = 0, nab = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const bool ia = a[i] > 0.5, ib = b[i] > 0.5;
        na += ia;
        nb += ib;
        nab += (ia && ib);
    }
    if (na + nb == 0) return 1.0;  // both empty: perfect agreement of emptiness
    return 2.0 * static_cast<double>(nab) / static_cast<double>(na + nb);
}

namespace {

// Continued-fraction evaluation of the regularized incomplete beta I_x(a,b)
// (modified Lentz).
double betacf(double a, double b, double x) {
    constexpr int kMaxIter = 300;
    constexpr double kEps = 3e-16;
    constexpr double kFpMin = 1e-300;
    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < kFpMin) d = kFpMin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::abs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::abs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kEps) break;
    }
    return h;
}

double incomplete_beta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                            a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0)) return front * betacf(a, b, x) / a;
    return 1.0 - front * betacf(b, a, 1.0 - x) / b;
}

}  // namespace

double student_t_two_sided_p(double t, int dof) {
    if (dof < 1) throw DataError("student_t_two_sided_p: dof must be >= 1");
    if (std::isinf(t)) return 0.0;
    const double nu = static_cast<double>(dof);
    const double x = nu / (nu + t * t);
    return incomplete_beta(nu / 2.0, 0.5, x);
}

TTestResult paired_t_test(const std::vector<double>& errs_a, const std::vector<double>& errs_b) {
    if (errs_a.size() != errs_b.size())
        throw DataError("paired_t_test: sample lists have different lengths");
    const int n = static_cast<int>(errs_a.size());
    if (n < 2) throw DataError("paired_t_test: need at least 2 paired samples");

    double mean = 0.0;
    for (int i = 0; i < n; ++i) mean += errs_a[i] - errs_b[i];
    mean /= n;
    double ss = 0.0;
    for (int i = 0; i < n; ++i) {
        const double d = errs_a[i] - errs_b[i] - mean;
        ss += d * d;
    }
    const double sd = std::sqrt(ss / (n - 1));

    TTestResult r;
    if (sd == 0.0) {
        if (mean == 0.0) {
            r.t = 0.0;
            r.p = 1.0;
        } else {
            r.t = mean > 0.0 ? std::numeric_limits<double>::infinity()
                             : -std::numeric_limits<double>::infinity();
            r.p = 0.0;
            r.degenerate_variance = true;
        }
        return r;
    }
    r.t = mean / (sd / std::sqrt(static_cast<double>(n)));
    r.p = student_t_two_sided_p(r.t, n - 1);
    return r;
}

std::vector<PerturbationPoint> perturbation_study(const ScalarField& target_image,
                                                  const ScalarField& source_image,
                                                  const LandmarkSet& init_landmarks,
                                                  const LandmarkSet& validation_landmarks,
                                                  const std::vector<double>& sigmas,
                                                  std::uint64_t seed, const FlowParams& params,
                                                  int repeats) {
    if (repeats < 1) throw DataError("perturbation_study: repeats must be >= 1");
    std::vector<PerturbationPoint> curve;
    curve.reserve(sigmas.size());

    for (std::size_t si = 0; si < sigmas.size(); ++si) {
        const double sigma = sigmas[si];
        if (sigma < 0.0) throw DataError("perturbation_study: sigma must be non-negative");
        PerturbationPoint pt;
        pt.sigma = sigma;
        const int runs = sigma == 0.0 ? 1 : repeats;
        double tre_sum = 0.0, pert_sum = 0.0;
        int ok = 0;
        for (int rep = 0; rep < runs; ++rep) {
            LandmarkSet lm = init_landmarks;
            double pert = 0.0;
            if (sigma > 0.0) {
                Rng rng(mix_seed(seed, si * 1000 + static_cast<std::uint64_t>(rep)));
                for (auto& pr : lm.pairs) {
                    Vec noise;
                    for (int d = 0; d < lm.ndims; ++d) noise[d] = rng.gaussian(sigma);
                    pr.source += noise;
                    pert += noise.norm();
                }
                pert /= static_cast<double>(lm.size());
            }
            try {
                const RegistrationResult res = avocado(target_image, source_image, lm, params);
                const TreResult tre = target_registration_error(res.map, validation_landmarks);
                tre_sum += tre.mean();
                pert_sum += pert;
                ++ok;
            } catch (const Error&) {
                ++pt.failed_runs;
            }
        }
        pt.mean_tre = ok > 0 ? tre_sum / ok : std::numeric_limits<double>::quiet_NaN();
        pt.mean_perturbation = ok > 0 ? pert_sum / ok : 0.0;
        curve.push_back(pt);
    }
    return curve;
}

}  // namespace avocado
