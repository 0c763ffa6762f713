#include "dsmr/raster.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include "dsmr/png_io.hpp"

namespace dsmr {

void GeoTransform::validate() const {
    if (!(pixel_size_x > 0.0))
        throw ValidationError("geotransform: pixel_size_x must be > 0");
    if (!(pixel_size_y < 0.0))
        throw ValidationError("geotransform: pixel_size_y must be < 0");
    if (!std::isfinite(origin_x) || !std::isfinite(origin_y) ||
        !std::isfinite(pixel_size_x) || !std::isfinite(pixel_size_y))
        throw ValidationError("geotransform: non-finite term");
}

void RasterGrid::validate() const {
    transform.validate();
    if (width <= 0 || height <= 0)
        throw ValidationError("raster: non-positive dimensions");
    if (values.size() != static_cast<size_t>(width) * height)
        throw ValidationError("raster: value count does not match width*height");
    for (float v : values) {
        if (!is_nodata(v) && !std::isfinite(v))
            throw ValidationError("raster: non-finite value outside nodata");
    }
}

void MaskGrid::validate() const {
    transform.validate();
    if (width <= 0 || height <= 0)
        throw ValidationError("mask: non-positive dimensions");
    if (values.size() != static_cast<size_t>(width) * height)
        throw ValidationError("mask: value count does not match width*height");
    for (uint8_t v : values) {
        if (v > 1) throw ValidationError("mask: values must be 0 or 1");
    }
}

bool aligned(const RasterGrid& a, const RasterGrid& b) {
    return a.width == b.width && a.height == b.height && a.transform == b.transform;
}

bool aligned(const RasterGrid& a, const MaskGrid& b) {
    return a.width == b.width && a.height == b.height && a.transform == b.transform;
}

void require_aligned(const RasterGrid& a, const RasterGrid& b, const std::string& what) {
    if (!aligned(a, b)) throw AlignmentError(what + ": grids are not aligned");
}

void require_aligned(const RasterGrid& a, const MaskGrid& b, const std::string& what) {
    if (!aligned(a, b)) throw AlignmentError(what + ": mask is not aligned");
}

// ---------------------------------------------------------------------------
// RFG / RFM container
// ---------------------------------------------------------------------------

namespace {

void put_u32(std::string& out, uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_f32(std::string& out, float v) {
    uint32_t bits;
    std::memcpy(&bits, &v, 4);
    put_u32(out, bits);
}

void put_f64(std::string& out, double v) {
    uint64_t bits;
    std::memcpy(&bits, &v, 8);
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
}

struct Reader {
    const std::string& buf;
    size_t pos = 0;
    const std::string& path;

    void need(size_t n) const {
        if (pos + n > buf.size())
            throw FormatError(path + ": truncated file");
    }
    uint32_t u32() {
        need(4);
        uint32_t v = 0;
        for (int i = 0; i < 4; ++i)
            v |= static_cast<uint32_t>(static_cast<uint8_t>(buf[pos + i])) << (8 * i);
        pos += 4;
        return v;
    }
    float f32() {
        uint32_t bits = u32();
        float v;
        std::memcpy(&v, &bits, 4);
        return v;
    }
    double f64() {
        need(8);
        uint64_t bits = 0;
        for (int i = 0; i < 8; ++i)
            bits |= static_cast<uint64_t>(static_cast<uint8_t>(buf[pos + i])) << (8 * i);
        pos += 8;
        double v;
        std::memcpy(&v, &bits, 8);
        return v;
    }
};

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open " + path);
    std::string buf((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    return buf;
}

void write_file(const std::string& path, const std::string& buf) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open " + path + " for writing");
    f.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!f) throw IoError("write failed on " + path);
}

// Shared header: magic(4) width(4) height(4) geotransform terms(6 x f64).
// Term order: origin_x, pixel_size_x, rot_xy, origin_y, rot_yx, pixel_size_y.
void put_header(std::string& out, const char* magic, int width, int height,
                const GeoTransform& t) {
    out.append(magic, 4);
    put_u32(out, static_cast<uint32_t>(width));
    put_u32(out, static_cast<uint32_t>(height));
    put_f64(out, t.origin_x);
    put_f64(out, t.pixel_size_x);
    put_f64(out, 0.0);
    put_f64(out, t.origin_y);
    put_f64(out, 0.0);
    put_f64(out, t.pixel_size_y);
}

GeoTransform read_transform(Reader& r, const std::string& path) {
    GeoTransform t;
    t.origin_x = r.f64();
    t.pixel_size_x = r.f64();
    const double rot_xy = r.f64();
    t.origin_y = r.f64();
    const double rot_yx = r.f64();
    t.pixel_size_y = r.f64();
    if (rot_xy != 0.0 || rot_yx != 0.0)
        throw FormatError(path + ": rotation terms must be zero");
    return t;
}

} // namespace

RasterGrid read_rfg(const std::string& path) {
    const std::string buf = read_file(path);
    if (buf.size() < 4 || buf.compare(0, 4, "RFG1") != 0)
        throw FormatError(path + ": bad magic, expected RFG1");
    Reader r{buf, 4, path};
    RasterGrid g;
    g.width = static_cast<int>(r.u32());
    g.height = static_cast<int>(r.u32());
    g.transform = read_transform(r, path);
    g.nodata = r.f32();
    const size_t n = static_cast<size_t>(g.width) * g.height;
    r.need(n * 4);
    if (buf.size() != r.pos + n * 4)
        throw FormatError(path + ": payload length does not match header");
    g.values.resize(n);
    for (size_t i = 0; i < n; ++i) g.values[i] = r.f32();
    g.validate();
    return g;
}

void write_rfg(const RasterGrid& grid, const std::string& path) {
    grid.validate();
    std::string out;
    out.reserve(68 + grid.values.size() * 4);
    put_header(out, "RFG1", grid.width, grid.height, grid.transform);
    put_f32(out, grid.nodata);
    for (float v : grid.values) put_f32(out, v);
    write_file(path, out);
}

MaskGrid read_rfm(const std::string& path) {
    const std::string buf = read_file(path);
    if (buf.size() < 4 || buf.compare(0, 4, "RFM1") != 0)
        throw FormatError(path + ": bad magic, expected RFM1");
    Reader r{buf, 4, path};
    MaskGrid m;
    m.width = static_cast<int>(r.u32());
    m.height = static_cast<int>(r.u32());
    m.transform = read_transform(r, path);
    const size_t n = static_cast<size_t>(m.width) * m.height;
    r.need(n);
    if (buf.size() != r.pos + n)
        throw FormatError(path + ": payload length does not match header");
    m.values.assign(buf.begin() + static_cast<std::ptrdiff_t>(r.pos), buf.end());
    m.validate();
    return m;
}

void write_rfm(const MaskGrid& mask, const std::string& path) {
    mask.validate();
    std::string out;
    out.reserve(60 + mask.values.size());
    put_header(out, "RFM1", mask.width, mask.height, mask.transform);
    out.append(reinterpret_cast<const char*>(mask.values.data()), mask.values.size());
    write_file(path, out);
}

// ---------------------------------------------------------------------------
// Rendering
// ---------------------------------------------------------------------------

namespace {

// Central differences in the interior, one-sided at borders. Returns
// dz/dx (eastwards) and dz/dy (northwards) in value units per meter.
// Nodata neighbors poison the result (returns false).
bool surface_gradient(const RasterGrid& g, int row, int col, double& dzdx, double& dzdy) {
    const double px = g.transform.pixel_size_x;
    const double py = g.transform.pixel_size_y; // negative
    auto value = [&](int r, int c, bool& ok) -> double {
        const float v = g.at(r, c);
        if (g.is_nodata(v)) ok = false;
        return v;
    };
    bool ok = true;
    const int cl = std::max(0, col - 1), cr = std::min(g.width - 1, col + 1);
    const int ru = std::max(0, row - 1), rd = std::min(g.height - 1, row + 1);
    const double hx = (value(row, cr, ok) - value(row, cl, ok)) / ((cr - cl) * px);
    // Row index grows southwards, so the world-y derivative flips sign via py.
    const double hy = (value(rd, col, ok) - value(ru, col, ok)) / ((rd - ru) * py);
    dzdx = hx;
    dzdy = hy;
    return ok;
}

std::array<uint8_t, 3> colormap_entry(double t) {
    // Compact viridis approximation, linearly interpolated anchors.
    static constexpr double anchors[9][3] = {
        {0.267, 0.005, 0.329}, {0.283, 0.141, 0.458}, {0.254, 0.265, 0.530},
        {0.207, 0.372, 0.553}, {0.164, 0.471, 0.558}, {0.128, 0.567, 0.551},
        {0.135, 0.659, 0.518}, {0.267, 0.749, 0.441}, {0.993, 0.906, 0.144}};
    t = std::clamp(t, 0.0, 1.0);
    const double x = t * 8.0;
    const int i = std::min(7, static_cast<int>(x));
    const double f = x - i;
    std::array<uint8_t, 3> rgb{};
    for (int c = 0; c < 3; ++c) {
        const double v = anchors[i][c] + f * (anchors[i + 1][c] - anchors[i][c]);
        rgb[c] = static_cast<uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
    }
    return rgb;
}

} // namespace

std::vector<double> hillshade_field(const RasterGrid& grid, const SunVector& sun) {
    const double az = sun.azimuth_deg * M_PI / 180.0;
    const double alt = sun.altitude_deg * M_PI / 180.0;
    // x east, y north, z up; azimuth clockwise from north.
    const double sx = std::cos(alt) * std::sin(az);
    const double sy = std::cos(alt) * std::cos(az);
    const double sz = std::sin(alt);

    std::vector<double> shade(grid.values.size(), -1.0); // -1 marks nodata
    for (int r = 0; r < grid.height; ++r) {
        for (int c = 0; c < grid.width; ++c) {
            if (grid.is_nodata(grid.at(r, c))) continue;
            double dzdx, dzdy;
            if (!surface_gradient(grid, r, c, dzdx, dzdy)) continue;
            const double nx = -dzdx, ny = -dzdy, nz = 1.0;
            const double inv_len = 1.0 / std::sqrt(nx * nx + ny * ny + 1.0);
            const double lambert = (nx * sx + ny * sy + nz * sz) * inv_len;
            shade[static_cast<size_t>(r) * grid.width + c] = std::max(0.0, lambert);
        }
    }
    return shade;
}

void render_png(const RasterGrid& grid, RenderMode mode, const std::string& out_path,
                const SunVector& sun) {
    grid.validate();
    size_t valid = 0;
    for (float v : grid.values)
        if (!grid.is_nodata(v)) ++valid;
    if (valid == 0) throw EmptyDomainError("render_png: all pixels are nodata");

    if (mode == RenderMode::Hillshade) {
        const std::vector<double> shade = hillshade_field(grid, sun);
        std::vector<uint8_t> px(grid.values.size());
        for (size_t i = 0; i < shade.size(); ++i) {
            px[i] = shade[i] < 0.0
                        ? 0
                        : static_cast<uint8_t>(std::lround(std::clamp(shade[i], 0.0, 1.0) * 255.0));
        }
        write_png(out_path, grid.width, grid.height, 1, px);
        return;
    }

    const GridStats stats = compute_stats(grid);
    const double lo = stats.min(), hi = stats.max();
    const double span = hi > lo ? hi - lo : 1.0;
    std::vector<uint8_t> px(grid.values.size() * 3);
    for (size_t i = 0; i < grid.values.size(); ++i) {
        const float v = grid.values[i];
        if (grid.is_nodata(v)) {
            px[3 * i] = 255;
            px[3 * i + 1] = 0;
            px[3 * i + 2] = 255; // magenta sentinel
            continue;
        }
        const double t = hi > lo ? (v - lo) / span : 0.5;
        const auto rgb = colormap_entry(t);
        px[3 * i] = rgb[0];
        px[3 * i + 1] = rgb[1];
        px[3 * i + 2] = rgb[2];
    }
    write_png(out_path, grid.width, grid.height, 3, px);
}

// ---------------------------------------------------------------------------
// Sampling and statistics
// ---------------------------------------------------------------------------

float sample_bilinear(const RasterGrid& grid, double wx, double wy) {
    auto [cf, rf] = grid.transform.pixel(wx, wy);
    constexpr double kEdgeTol = 1e-9;
    if (cf < -kEdgeTol || cf > grid.width - 1 + kEdgeTol ||
        rf < -kEdgeTol || rf > grid.height - 1 + kEdgeTol)
        throw RangeError("sample point outside raster extent");
    cf = std::clamp(cf, 0.0, static_cast<double>(grid.width - 1));
    rf = std::clamp(rf, 0.0, static_cast<double>(grid.height - 1));

    const int c0 = std::min(static_cast<int>(cf), std::max(0, grid.width - 2));
    const int r0 = std::min(static_cast<int>(rf), std::max(0, grid.height - 2));
    const int c1 = std::min(c0 + 1, grid.width - 1);
    const int r1 = std::min(r0 + 1, grid.height - 1);
    const double fc = cf - c0;
    const double fr = rf - r0;

    const float v00 = grid.at(r0, c0), v01 = grid.at(r0, c1);
    const float v10 = grid.at(r1, c0), v11 = grid.at(r1, c1);
    if (grid.is_nodata(v00) || grid.is_nodata(v01) || grid.is_nodata(v10) || grid.is_nodata(v11))
        return grid.nodata;

    const double top = v00 + fc * (v01 - v00);
    const double bot = v10 + fc * (v11 - v10);
    return static_cast<float>(top + fr * (bot - top));
}

std::vector<ProfileSample> extract_profile(const RasterGrid& grid,
                                           double x0, double y0,
                                           double x1, double y1, int n) {
    if (n < 2) throw ConfigError("extract_profile: need at least 2 samples");
    if (x0 == x1 && y0 == y1) throw ConfigError("extract_profile: endpoints coincide");
    const double dist = std::hypot(x1 - x0, y1 - y0);
    std::vector<ProfileSample> out;
    out.reserve(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / (n - 1);
        const double wx = x0 + t * (x1 - x0);
        const double wy = y0 + t * (y1 - y0);
        out.push_back({t * dist, static_cast<double>(sample_bilinear(grid, wx, wy))});
    }
    return out;
}

GridStats::GridStats(std::vector<float> valid_values) : sorted_(std::move(valid_values)) {
    if (sorted_.empty()) throw EmptyDomainError("stats over zero valid pixels");
    std::sort(sorted_.begin(), sorted_.end());
}

double GridStats::percentile(double p) const {
    if (p < 0.0 || p > 100.0) throw ConfigError("percentile outside [0,100]");
    if (sorted_.size() == 1) return sorted_[0];
    const double rank = p / 100.0 * static_cast<double>(sorted_.size() - 1);
    const size_t lo = static_cast<size_t>(rank);
    if (lo + 1 >= sorted_.size()) return sorted_.back();
    const double frac = rank - static_cast<double>(lo);
    return sorted_[lo] + frac * (static_cast<double>(sorted_[lo + 1]) - sorted_[lo]);
}

GridStats compute_stats(const RasterGrid& grid, const MaskGrid* mask) {
    if (mask) require_aligned(grid, *mask, "compute_stats");
    std::vector<float> vals;
    vals.reserve(grid.values.size());
    for (size_t i = 0; i < grid.values.size(); ++i) {
        if (mask && mask->values[i] == 0) continue;
        const float v = grid.values[i];
        if (grid.is_nodata(v)) continue;
        vals.push_back(v);
    }
    return GridStats(std::move(vals));
}

} // namespace dsmr
