#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "dsmr/errors.hpp"

namespace dsmr {

// Affine pixel -> world mapping, north-up (no rotation terms).
// world(col, row) = (origin_x + col * pixel_size_x, origin_y + row * pixel_size_y)
struct GeoTransform {
    double origin_x = 0.0;
    double origin_y = 0.0;
    double pixel_size_x = 1.0;  // > 0
    double pixel_size_y = -1.0; // < 0, rows grow southwards

    std::pair<double, double> world(double col, double row) const {
        return {origin_x + col * pixel_size_x, origin_y + row * pixel_size_y};
    }
    std::pair<double, double> pixel(double wx, double wy) const {
        return {(wx - origin_x) / pixel_size_x, (wy - origin_y) / pixel_size_y};
    }

    bool operator==(const GeoTransform&) const = default;

    void validate() const;
};

// Single-band georeferenced grid of 32-bit values, row-major, top row first.
struct RasterGrid {
    int width = 0;
    int height = 0;
    GeoTransform transform;
    float nodata = -9999.0f;
    std::vector<float> values;

    RasterGrid() = default;
    RasterGrid(int w, int h, GeoTransform t, float nd = -9999.0f, float fill = 0.0f)
        : width(w), height(h), transform(t), nodata(nd),
          values(static_cast<size_t>(w) * h, fill) {}

    float& at(int row, int col) { return values[static_cast<size_t>(row) * width + col]; }
    float at(int row, int col) const { return values[static_cast<size_t>(row) * width + col]; }

    bool is_nodata(float v) const {
        return v == nodata || (std::isnan(v) && std::isnan(nodata));
    }

    // Throws ValidationError on size mismatch or non-finite data values.
    void validate() const;
};

// Per-pixel {0,1} mask sharing the raster layout.
struct MaskGrid {
    int width = 0;
    int height = 0;
    GeoTransform transform;
    std::vector<uint8_t> values;

    MaskGrid() = default;
    MaskGrid(int w, int h, GeoTransform t, uint8_t fill = 0)
        : width(w), height(h), transform(t),
          values(static_cast<size_t>(w) * h, fill) {}

    uint8_t& at(int row, int col) { return values[static_cast<size_t>(row) * width + col]; }
    uint8_t at(int row, int col) const { return values[static_cast<size_t>(row) * width + col]; }

    void validate() const;
};

// Two grids are aligned when they share size and geotransform.
bool aligned(const RasterGrid& a, const RasterGrid& b);
bool aligned(const RasterGrid& a, const MaskGrid& b);
void require_aligned(const RasterGrid& a, const RasterGrid& b, const std::string& what);
void require_aligned(const RasterGrid& a, const MaskGrid& b, const std::string& what);

// RFG/RFM container I/O. Little-endian, bit-exact round trip.
RasterGrid read_rfg(const std::string& path);
void write_rfg(const RasterGrid& grid, const std::string& path);
MaskGrid read_rfm(const std::string& path);
void write_rfm(const MaskGrid& mask, const std::string& path);

enum class RenderMode { Hillshade, Colormap };

struct SunVector {
    double azimuth_deg = 315.0;  // clockwise from north
    double altitude_deg = 45.0;
};

// Lambertian hillshade intensity in [0,1] for every pixel. Normals come from
// central differences (one-sided at borders) over the physical pixel size.
std::vector<double> hillshade_field(const RasterGrid& grid, const SunVector& sun);

void render_png(const RasterGrid& grid, RenderMode mode, const std::string& out_path,
                const SunVector& sun = {});

struct ProfileSample {
    double distance_m = 0.0;
    double height_m = 0.0;
};

// n samples uniformly spaced on the world-coordinate segment p0 -> p1,
// heights by bilinear interpolation between pixel centers.
std::vector<ProfileSample> extract_profile(const RasterGrid& grid,
                                           double x0, double y0,
                                           double x1, double y1, int n);

// Bilinear sample at a world coordinate; nodata if any contributing pixel is
// nodata. Throws RangeError outside the pixel-center extent.
float sample_bilinear(const RasterGrid& grid, double wx, double wy);

// Order statistics over the valid (non-nodata, in-mask) pixels.
class GridStats {
public:
    explicit GridStats(std::vector<float> valid_values);

    double min() const { return sorted_.front(); }
    double max() const { return sorted_.back(); }
    size_t count() const { return sorted_.size(); }
    // Linear interpolation between order statistics, p in [0,100].
    double percentile(double p) const;

private:
    std::vector<float> sorted_;
};

GridStats compute_stats(const RasterGrid& grid, const MaskGrid* mask = nullptr);

} // namespace dsmr
