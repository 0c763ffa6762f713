#include "dsmr/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace dsmr {

std::vector<double> masked_errors(const RasterGrid& pred, const RasterGrid& gt,
                                  const MaskGrid& mask) {
    require_aligned(pred, gt, "metrics");
    require_aligned(pred, mask, "metrics");
    std::vector<double> errors;
    errors.reserve(mask.values.size());
    for (size_t i = 0; i < mask.values.size(); ++i) {
        if (mask.values[i] == 0) continue;
        const float p = pred.values[i];
        const float g = gt.values[i];
        if (pred.is_nodata(p) || gt.is_nodata(g)) continue;
        errors.push_back(static_cast<double>(p) - static_cast<double>(g));
    }
    if (errors.empty())
        throw EmptyDomainError("metrics: no valid pixels under the mask");
    return errors;
}

double median(std::vector<double> values) {
    if (values.empty()) throw EmptyDomainError("median of empty sample");
    std::sort(values.begin(), values.end());
    const size_t n = values.size();
    if (n % 2 == 1) return values[n / 2];
    return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

namespace {

double rmse_of(const std::vector<double>& e) {
    double acc = 0.0;
    for (double d : e) acc += d * d;
    return std::sqrt(acc / static_cast<double>(e.size()));
}

double mae_of(const std::vector<double>& e) {
    double acc = 0.0;
    for (double d : e) acc += std::abs(d);
    return acc / static_cast<double>(e.size());
}

// 1.4826 * median(|dh - median(dh)|); the constant matches the standard
// deviation under normally distributed errors.
double nmad_of(const std::vector<double>& e) {
    const double med = median(e);
    std::vector<double> dev(e.size());
    for (size_t i = 0; i < e.size(); ++i) dev[i] = std::abs(e[i] - med);
    return 1.4826 * median(std::move(dev));
}

} // namespace

double rmse(const RasterGrid& pred, const RasterGrid& gt, const MaskGrid& mask) {
    return rmse_of(masked_errors(pred, gt, mask));
}

double nmad(const RasterGrid& pred, const RasterGrid& gt, const MaskGrid& mask) {
    return nmad_of(masked_errors(pred, gt, mask));
}

double mae(const RasterGrid& pred, const RasterGrid& gt, const MaskGrid& mask) {
    return mae_of(masked_errors(pred, gt, mask));
}

MetricsReport evaluate(const RasterGrid& pred, const RasterGrid& gt,
                       const MaskGrid& mask, const std::string& method) {
    const std::vector<double> e = masked_errors(pred, gt, mask);
    MetricsReport r;
    r.method = method;
    r.rmse_m = rmse_of(e);
    r.nmad_m = nmad_of(e);
    r.mae_m = mae_of(e);
    r.n_pixels = static_cast<int64_t>(e.size());
    return r;
}

void write_metrics_csv(std::ostream& out, const std::vector<MetricsReport>& reports) {
    out << "method,rmse_m,nmad_m,mae_m,n_pixels\n";
    char buf[64];
    for (const MetricsReport& r : reports) {
        out << r.method;
        std::snprintf(buf, sizeof(buf), ",%.6f,%.6f,%.6f,", r.rmse_m, r.nmad_m, r.mae_m);
        out << buf << r.n_pixels << "\n";
    }
}

} // namespace dsmr
