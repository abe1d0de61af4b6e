#include "analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace compwave {

std::vector<double> zero_mode(const Field& f) {
    const int n1 = f.shape[0];
    const size_t stride = static_cast<size_t>(f.shape[1]) * f.shape[2];
    std::vector<double> avg(n1);
    for (int i = 0; i < n1; ++i)
        avg[i] = stable_sum(f.v.data() + i * stride, stride) / static_cast<double>(stride);
    return avg;
}

Field nonzero_mode(const Field& f) {
    Field out = f;
    const std::vector<double> avg = zero_mode(f);
    const size_t stride = static_cast<size_t>(f.shape[1]) * f.shape[2];
    for (int i = 0; i < f.shape[0]; ++i) {
        double* row = out.v.data() + i * stride;
        for (size_t s = 0; s < stride; ++s) row[s] -= avg[i];
    }
    return out;
}

double lp_norm(const Field& f, double p, const std::vector<double>& x1_weights) {
    if (x1_weights.size() != static_cast<size_t>(f.shape[0]))
        throw std::invalid_argument("lp_norm: weight/shape mismatch");
    const size_t stride = static_cast<size_t>(f.shape[1]) * f.shape[2];
    if (p == kInfNorm) {
        double m = 0.0;
        for (double x : f.v) m = std::max(m, std::abs(x));
        return m;
    }
    if (p < 1.0) throw std::invalid_argument("lp_norm: p must be >= 1");
    const double tw = 1.0 / static_cast<double>(stride);
    std::vector<double> line(f.shape[0]);
    std::vector<double> cell(stride);
    for (int i = 0; i < f.shape[0]; ++i) {
        const double* row = f.v.data() + i * stride;
        for (size_t s = 0; s < stride; ++s) cell[s] = std::pow(std::abs(row[s]), p);
        line[i] = x1_weights[i] * tw * stable_sum(cell);
    }
    return std::pow(stable_sum(line), 1.0 / p);
}

double lp_norm_line(const std::vector<double>& line, double p,
                    const std::vector<double>& x1_weights) {
    if (x1_weights.size() != line.size())
        throw std::invalid_argument("lp_norm_line: weight/size mismatch");
    if (p == kInfNorm) {
        double m = 0.0;
        for (double x : line) m = std::max(m, std::abs(x));
        return m;
    }
    if (p < 1.0) throw std::invalid_argument("lp_norm_line: p must be >= 1");
    std::vector<double> acc(line.size());
    for (size_t i = 0; i < line.size(); ++i)
        acc[i] = x1_weights[i] * std::pow(std::abs(line[i]), p);
    return std::pow(stable_sum(acc), 1.0 / p);
}

RegionEnergy weighted_region_energy(const Field& phi, const Field& ubar,
                                    const std::vector<double>& duhat_line,
                                    const std::vector<double>& x1_weights) {
    if (phi.shape != ubar.shape)
        throw std::invalid_argument("region energy: field shape mismatch");
    if (duhat_line.size() != static_cast<size_t>(phi.shape[0]) ||
        x1_weights.size() != duhat_line.size())
        throw std::invalid_argument("region energy: line size mismatch");
    const size_t stride = static_cast<size_t>(phi.shape[1]) * phi.shape[2];
    const double tw = 1.0 / static_cast<double>(stride);
    RegionEnergy e;
    for (int i = 0; i < phi.shape[0]; ++i) {
        const double wslope = x1_weights[i] * tw * duhat_line[i];
        const double* pr = phi.v.data() + i * stride;
        const double* br = ubar.v.data() + i * stride;
        double r1 = 0.0, r2 = 0.0, r3 = 0.0;
        for (size_t s = 0; s < stride; ++s) {
            const double b = br[s], q = br[s] + pr[s];
            if (q > 0.0 && b > 0.0) r1 += pr[s] * pr[s];
            else if (q > 0.0) r2 += q * q;
            else if (b > 0.0) r3 += b * b;
        }
        e.region1 += wslope * r1;
        e.region2 += wslope * r2;
        e.region3 += wslope * r3;
    }
    return e;
}

namespace {
SeriesFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    SeriesFit f;
    const int n = static_cast<int>(x.size());
    f.npoints = n;
    int distinct = 1;
    for (int i = 1; i < n; ++i)
        if (x[i] != x[i - 1]) ++distinct;
    if (n < 3 || distinct <= 2) {
        f.status = FitStatus::Degenerate;
        return f;
    }
    double sx = 0, sy = 0;
    for (int i = 0; i < n; ++i) { sx += x[i]; sy += y[i]; }
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0, syy = 0;
    for (int i = 0; i < n; ++i) {
        const double dx = x[i] - mx, dy = y[i] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double ssr = 0.0;
    for (int i = 0; i < n; ++i) {
        const double r = y[i] - (f.intercept + f.slope * x[i]);
        ssr += r * r;
    }
    f.r2 = syy > 0.0 ? 1.0 - ssr / syy : 1.0;
    f.stderr_slope = n > 2 ? std::sqrt(ssr / (n - 2) / sxx) : 0.0;
    f.status = FitStatus::Ok;
    return f;
}

void collect_window(const std::vector<double>& t, const std::vector<double>& v,
                    double lo, double hi, std::vector<double>& tw, std::vector<double>& vw) {
    if (t.size() != v.size()) throw std::invalid_argument("fit: series size mismatch");
    for (size_t i = 0; i < t.size(); ++i)
        if (t[i] >= lo && t[i] <= hi) {
            tw.push_back(t[i]);
            vw.push_back(v[i]);
        }
}
}  // namespace

bool series_at_floor(const std::vector<double>& value, double floor) {
    return std::all_of(value.begin(), value.end(),
                       [floor](double v) { return std::abs(v) <= floor; });
}

SeriesFit fit_power(const std::vector<double>& t, const std::vector<double>& value,
                    double window_lo, double window_hi) {
    std::vector<double> tw, vw;
    collect_window(t, value, window_lo, window_hi, tw, vw);
    SeriesFit bad;
    bad.window_lo = window_lo;
    bad.window_hi = window_hi;
    for (double v : vw)
        if (v <= 0.0) return bad;
    std::vector<double> x(tw.size()), y(vw.size());
    for (size_t i = 0; i < tw.size(); ++i) {
        x[i] = std::log1p(tw[i]);
        y[i] = std::log(vw[i]);
    }
    SeriesFit f = fit_line(x, y);
    f.window_lo = window_lo;
    f.window_hi = window_hi;
    return f;
}

SeriesFit fit_exponential(const std::vector<double>& t, const std::vector<double>& value,
                          double window_lo, double window_hi) {
    std::vector<double> tw, vw;
    collect_window(t, value, window_lo, window_hi, tw, vw);
    SeriesFit bad;
    bad.window_lo = window_lo;
    bad.window_hi = window_hi;
    for (double v : vw)
        if (v <= 0.0) return bad;
    std::vector<double> y(vw.size());
    for (size_t i = 0; i < vw.size(); ++i) y[i] = std::log(vw[i]);
    SeriesFit f = fit_line(tw, y);
    f.rate = -f.slope;
    f.window_lo = window_lo;
    f.window_hi = window_hi;
    return f;
}

}  // namespace compwave
