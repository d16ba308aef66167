#include "mrdc/data.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>

#include <nlohmann/json.hpp>

#include "mrdc/rng.hpp"

static_assert(std::endian::native == std::endian::little,
              "dataset payloads are written as raw little-endian floats");

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace mrdc {

void draw_ellipse(std::vector<double>& canvas, int height, int width, double center_y,
                  double center_x, double radius_y, double radius_x, double angle,
                  double intensity) {
    const double cos_a = std::cos(angle);
    const double sin_a = std::sin(angle);
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            const double dy = y - center_y;
            const double dx = x - center_x;
            const double u = (cos_a * dx + sin_a * dy) / radius_x;
            const double v = (-sin_a * dx + cos_a * dy) / radius_y;
            if (u * u + v * v <= 1.0)
                canvas[static_cast<std::size_t>(y) * width + x] += intensity;
        }
    }
}

ComplexImage make_phantom(int height, int width, std::uint64_t seed, int n_ellipses,
                          double phase_scale) {
    if (n_ellipses < 1) throw std::invalid_argument("make_phantom: n_ellipses must be >= 1");

    Rng rng(seed);
    std::vector<double> mag(static_cast<std::size_t>(height) * width, 0.0);
    for (int e = 0; e < n_ellipses; ++e) {
        const double cy = rng.uniform(0.25, 0.75) * height;
        const double cx = rng.uniform(0.25, 0.75) * width;
        const double ry = rng.uniform(0.06, 0.22) * height;
        const double rx = rng.uniform(0.06, 0.22) * width;
        const double angle = rng.uniform(0.0, std::numbers::pi);
        const double intensity = rng.uniform(0.1, 1.0);
        draw_ellipse(mag, height, width, cy, cx, ry, rx, angle, intensity);
    }
    for (auto& v : mag) v = std::clamp(v, 0.0, 1.0);

    // smooth quadratic phase over normalized [-1,1] coordinates
    double coeff[6];
    for (double& c : coeff) c = rng.uniform(-0.8, 0.8) * std::numbers::pi * phase_scale;

    ComplexImage img(height, width);
    for (int y = 0; y < height; ++y) {
        const double v = height > 1 ? 2.0 * y / (height - 1) - 1.0 : 0.0;
        for (int x = 0; x < width; ++x) {
            const double u = width > 1 ? 2.0 * x / (width - 1) - 1.0 : 0.0;
            const double phase = coeff[0] + coeff[1] * u + coeff[2] * v +
                                 coeff[3] * u * u + coeff[4] * u * v + coeff[5] * v * v;
            img.at(y, x) = std::polar(mag[static_cast<std::size_t>(y) * width + x], phase);
        }
    }
    return img;
}

const std::vector<std::string>& protocol_tags() {
    static const std::vector<std::string> tags = {"p0", "p1", "p2", "p3", "p4"};
    return tags;
}

ComplexImage protocol_phantom(int height, int width, const std::string& protocol,
                              std::uint64_t seed) {
    const auto& tags = protocol_tags();
    const auto it = std::find(tags.begin(), tags.end(), protocol);
    if (it == tags.end()) throw std::invalid_argument("unknown protocol: " + protocol);
    const int idx = static_cast<int>(it - tags.begin());
    const int n_ellipses = 5 + 3 * idx;
    const double phase_scale = 0.6 + 0.4 * idx;
    return make_phantom(height, width, seed, n_ellipses, phase_scale);
}

DatasetRecord simulate_acquisition(const ComplexImage& phantom,
                                   const SensitivityMaps& maps,
                                   const SamplingMask& mask, double noise_sigma,
                                   std::uint64_t seed) {
    if (phantom.height != maps.height() || phantom.width != maps.width())
        throw std::invalid_argument("simulate_acquisition: phantom/maps shape mismatch");
    if (mask.height != phantom.height || mask.width != phantom.width)
        throw std::invalid_argument("simulate_acquisition: mask shape mismatch");
    if (noise_sigma < 0.0)
        throw std::invalid_argument("simulate_acquisition: negative noise sigma");

    DatasetRecord record;
    record.kspace_full = fft2c(expand(phantom, maps));
    if (noise_sigma > 0.0) {
        Rng rng(seed);
        const double component_sigma = noise_sigma / std::sqrt(2.0);
        for (auto& sample : record.kspace_full.data)
            sample += cplx(component_sigma * rng.normal(), component_sigma * rng.normal());
    }
    record.mask = mask;
    record.ref_maps = maps;
    record.noise_sigma = noise_sigma;
    record.seed = seed;
    return record;
}

namespace {

void write_cplx_file(const fs::path& path, const std::vector<cplx>& data) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError(IoError::Kind::FileAccess, "cannot open " + path.string());
    std::vector<float> payload(data.size() * 2);
    for (std::size_t i = 0; i < data.size(); ++i) {
        payload[2 * i] = static_cast<float>(data[i].real());
        payload[2 * i + 1] = static_cast<float>(data[i].imag());
    }
    out.write(reinterpret_cast<const char*>(payload.data()),
              static_cast<std::streamsize>(payload.size() * sizeof(float)));
    if (!out) throw IoError(IoError::Kind::FileAccess, "short write to " + path.string());
}

std::vector<cplx> read_cplx_file(const fs::path& path, std::size_t expected_samples) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(IoError::Kind::FileAccess, "cannot open " + path.string());
    in.seekg(0, std::ios::end);
    const auto bytes = static_cast<std::size_t>(in.tellg());
    in.seekg(0);
    const std::size_t expected_bytes = expected_samples * 2 * sizeof(float);
    if (bytes < expected_bytes)
        throw IoError(IoError::Kind::TruncatedPayload,
                      path.string() + ": expected " + std::to_string(expected_bytes) +
                          " bytes, found " + std::to_string(bytes));
    if (bytes != expected_bytes)
        throw IoError(IoError::Kind::MalformedHeader,
                      path.string() + ": payload larger than header promises");
    std::vector<float> payload(expected_samples * 2);
    in.read(reinterpret_cast<char*>(payload.data()),
            static_cast<std::streamsize>(expected_bytes));
    if (!in) throw IoError(IoError::Kind::TruncatedPayload, "short read " + path.string());
    std::vector<cplx> data(expected_samples);
    for (std::size_t i = 0; i < expected_samples; ++i)
        data[i] = cplx(payload[2 * i], payload[2 * i + 1]);
    return data;
}

}  // namespace

void write_dataset(const std::vector<DatasetRecord>& records, const std::string& dir) {
    fs::create_directories(dir);
    for (const auto& record : records) {
        if (record.id.empty()) throw std::invalid_argument("write_dataset: record without id");
        const fs::path tmp = fs::path(dir) / (".tmp-" + record.id);
        const fs::path dest = fs::path(dir) / record.id;
        fs::remove_all(tmp);
        fs::create_directories(tmp);

        json meta;
        meta["format_version"] = 1;
        meta["id"] = record.id;
        meta["protocol"] = record.protocol;
        meta["height"] = record.kspace_full.height;
        meta["width"] = record.kspace_full.width;
        meta["n_coil"] = record.kspace_full.n_coil;
        meta["noise_sigma"] = record.noise_sigma;
        meta["seed"] = record.seed;
        meta["sampled_lines"] = record.mask.sampled_lines;
        {
            std::ofstream out(tmp / "meta.json");
            if (!out) throw IoError(IoError::Kind::FileAccess, "cannot write meta.json");
            out << meta.dump(2) << "\n";
        }
        write_cplx_file(tmp / "kspace.cplx", record.kspace_full.data);
        if (record.ref_maps) write_cplx_file(tmp / "sens.cplx", record.ref_maps->maps.data);

        fs::remove_all(dest);
        fs::rename(tmp, dest);  // atomic publish
    }
}

std::vector<DatasetRecord> read_dataset(const std::string& dir) {
    if (!fs::is_directory(dir))
        throw IoError(IoError::Kind::FileAccess, "no such dataset directory: " + dir);

    std::vector<fs::path> record_dirs;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_directory()) continue;
        const std::string name = entry.path().filename().string();
        if (name.starts_with(".")) continue;
        record_dirs.push_back(entry.path());
    }
    std::sort(record_dirs.begin(), record_dirs.end());

    std::vector<DatasetRecord> records;
    records.reserve(record_dirs.size());
    for (const auto& record_dir : record_dirs) {
        json meta;
        {
            std::ifstream in(record_dir / "meta.json");
            if (!in)
                throw IoError(IoError::Kind::FileAccess,
                              "missing meta.json in " + record_dir.string());
            try {
                in >> meta;
            } catch (const json::exception& e) {
                throw IoError(IoError::Kind::MalformedHeader,
                              record_dir.string() + ": " + e.what());
            }
        }

        DatasetRecord record;
        try {
            const int version = meta.at("format_version").get<int>();
            if (version != 1)
                throw IoError(IoError::Kind::VersionMismatch,
                              record_dir.string() + ": unsupported format_version " +
                                  std::to_string(version));
            record.id = meta.at("id").get<std::string>();
            record.protocol = meta.at("protocol").get<std::string>();
            const int height = meta.at("height").get<int>();
            const int width = meta.at("width").get<int>();
            const int n_coil = meta.at("n_coil").get<int>();
            if (height < 1 || width < 1 || n_coil < 1)
                throw IoError(IoError::Kind::MalformedHeader,
                              record_dir.string() + ": non-positive dimensions");
            record.noise_sigma = meta.at("noise_sigma").get<double>();
            record.seed = meta.at("seed").get<std::uint64_t>();
            record.kspace_full = MultiCoilKSpace(n_coil, height, width);
            record.mask.height = height;
            record.mask.width = width;
            record.mask.seed = record.seed;
            record.mask.sampled_lines = meta.at("sampled_lines").get<std::vector<int>>();
            for (int line : record.mask.sampled_lines)
                if (line < 0 || line >= height)
                    throw IoError(IoError::Kind::MalformedHeader,
                                  record_dir.string() + ": sampled line out of range");
        } catch (const json::exception& e) {
            throw IoError(IoError::Kind::MalformedHeader,
                          record_dir.string() + ": " + e.what());
        }

        record.kspace_full.data =
            read_cplx_file(record_dir / "kspace.cplx", record.kspace_full.data.size());

        if (fs::exists(record_dir / "sens.cplx")) {
            SensitivityMaps maps;
            maps.maps = CoilStack(record.kspace_full.n_coil, record.kspace_full.height,
                                  record.kspace_full.width);
            maps.maps.data =
                read_cplx_file(record_dir / "sens.cplx", maps.maps.data.size());
            const std::size_t plane = maps.maps.plane_size();
            maps.support.assign(plane, 0);
            for (std::size_t p = 0; p < plane; ++p) {
                double rss = 0.0;
                for (int c = 0; c < maps.maps.n_coil; ++c)
                    rss += std::norm(maps.maps.data[c * plane + p]);
                // stored maps are RSS-normalized on support, zero elsewhere
                maps.support[p] = rss > 0.25 ? 1 : 0;
            }
            record.ref_maps = std::move(maps);
        }
        records.push_back(std::move(record));
    }
    return records;
}

void write_pgm16(const std::string& path, const ComplexImage& img) {
    double peak = 0.0;
    for (const auto& v : img.data) peak = std::max(peak, std::abs(v));
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError(IoError::Kind::FileAccess, "cannot open " + path);
    out << "P5\n" << img.width << " " << img.height << "\n65535\n";
    std::vector<unsigned char> row(static_cast<std::size_t>(img.width) * 2);
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            const double mag = std::abs(img.at(y, x));
            const auto level = static_cast<unsigned>(
                peak > 0.0 ? std::lround(65535.0 * mag / peak) : 0);
            row[2 * x] = static_cast<unsigned char>(level >> 8);  // big-endian per PGM
            row[2 * x + 1] = static_cast<unsigned char>(level & 0xff);
        }
        out.write(reinterpret_cast<const char*>(row.data()),
                  static_cast<std::streamsize>(row.size()));
    }
    if (!out) throw IoError(IoError::Kind::FileAccess, "short write to " + path);
}

void write_complex(const std::string& path, const ComplexImage& img) {
    write_cplx_file(path, img.data);
}

}  // namespace mrdc
