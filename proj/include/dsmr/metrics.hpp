#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "dsmr/raster.hpp"

namespace dsmr {

// Masked height-error metrics for one prediction/ground-truth pair, meters.
struct MetricsReport {
    std::string method;
    double rmse_m = 0.0;
    double nmad_m = 0.0;
    double mae_m = 0.0;
    int64_t n_pixels = 0;
};

// Signed height errors (pred - gt) over masked, non-nodata pixels.
std::vector<double> masked_errors(const RasterGrid& pred, const RasterGrid& gt,
                                  const MaskGrid& mask);

double rmse(const RasterGrid& pred, const RasterGrid& gt, const MaskGrid& mask);
double nmad(const RasterGrid& pred, const RasterGrid& gt, const MaskGrid& mask);
double mae(const RasterGrid& pred, const RasterGrid& gt, const MaskGrid& mask);

// All three metrics from a single pass over the masked pixel set.
MetricsReport evaluate(const RasterGrid& pred, const RasterGrid& gt,
                       const MaskGrid& mask, const std::string& method);

// Even-length inputs average the two central order statistics.
double median(std::vector<double> values);

// CSV table, one row per report: method,rmse_m,nmad_m,mae_m,n_pixels
void write_metrics_csv(std::ostream& out, const std::vector<MetricsReport>& reports);

} // namespace dsmr
