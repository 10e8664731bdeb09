#pragma once

#include <bit>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hnls/field.hpp"

namespace hnls {

static_assert(std::endian::native == std::endian::little, "serialized containers assume a little-endian host");

// ---------------------------------------------------------------------
// Flat binary field container.
//   bytes 0..7   magic "HNLSFLD1"
//   u32 n_x, u32 n_y
//   f64 x_period, u32 n_max, u32 reserved (0)
//   n_x * n_y interleaved (re, im) f64 pairs, rows in increasing signed m
//   from -n_x/2 to n_x/2 - 1, columns in increasing signed k likewise.
// ---------------------------------------------------------------------

inline void save_field_binary(const SpectralField& F, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("save_field_binary: cannot open " + path);
    const char magic[8] = {'H', 'N', 'L', 'S', 'F', 'L', 'D', '1'};
    out.write(magic, 8);
    const std::uint32_t nx = F.domain.n_x, ny = F.domain.n_y, nmax = F.domain.n_max, res = 0;
    out.write(reinterpret_cast<const char*>(&nx), 4);
    out.write(reinterpret_cast<const char*>(&ny), 4);
    out.write(reinterpret_cast<const char*>(&F.domain.x_period), 8);
    out.write(reinterpret_cast<const char*>(&nmax), 4);
    out.write(reinterpret_cast<const char*>(&res), 4);
    for (int m = -F.domain.n_x / 2; m < F.domain.n_x / 2; ++m) {
        const int ix = m >= 0 ? m : m + F.domain.n_x;
        for (int k = -F.domain.n_y / 2; k < F.domain.n_y / 2; ++k) {
            const int iy = k >= 0 ? k : k + F.domain.n_y;
            const complexd& c = F.coeffs[static_cast<std::size_t>(ix) * F.domain.n_y + iy];
            const double re = c.real(), im = c.imag();
            out.write(reinterpret_cast<const char*>(&re), 8);
            out.write(reinterpret_cast<const char*>(&im), 8);
        }
    }
    if (!out) throw std::runtime_error("save_field_binary: write failure on " + path);
}

inline SpectralField load_field_binary(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("load_field_binary: cannot open " + path);
    char magic[8];
    in.read(magic, 8);
    if (!in || std::memcmp(magic, "HNLSFLD1", 8) != 0)
        throw std::runtime_error("load_field_binary: bad magic in " + path);
    std::uint32_t nx = 0, ny = 0, nmax = 0, res = 0;
    double L = 0.0;
    in.read(reinterpret_cast<char*>(&nx), 4);
    in.read(reinterpret_cast<char*>(&ny), 4);
    in.read(reinterpret_cast<char*>(&L), 8);
    in.read(reinterpret_cast<char*>(&nmax), 4);
    in.read(reinterpret_cast<char*>(&res), 4);
    SpectralField F(DomainSpec(L, static_cast<int>(nx), static_cast<int>(ny), static_cast<int>(nmax)));
    for (int m = -F.domain.n_x / 2; m < F.domain.n_x / 2; ++m) {
        const int ix = m >= 0 ? m : m + F.domain.n_x;
        for (int k = -F.domain.n_y / 2; k < F.domain.n_y / 2; ++k) {
            const int iy = k >= 0 ? k : k + F.domain.n_y;
            double re = 0.0, im = 0.0;
            in.read(reinterpret_cast<char*>(&re), 8);
            in.read(reinterpret_cast<char*>(&im), 8);
            F.coeffs[static_cast<std::size_t>(ix) * F.domain.n_y + iy] = complexd(re, im);
        }
    }
    if (!in) throw std::runtime_error("load_field_binary: truncated file " + path);
    return F;
}

inline nlohmann::json field_to_json(const SpectralField& F) {
    nlohmann::json j;
    j["domain"] = {{"x_period", F.domain.x_period},
                   {"n_x", F.domain.n_x},
                   {"n_y", F.domain.n_y},
                   {"n_max", F.domain.n_max}};
    nlohmann::json rows = nlohmann::json::array();
    for (int m = -F.domain.n_x / 2; m < F.domain.n_x / 2; ++m) {
        const int ix = m >= 0 ? m : m + F.domain.n_x;
        for (int k = -F.domain.n_y / 2; k < F.domain.n_y / 2; ++k) {
            const int iy = k >= 0 ? k : k + F.domain.n_y;
            const complexd& c = F.coeffs[static_cast<std::size_t>(ix) * F.domain.n_y + iy];
            rows.push_back({c.real(), c.imag()});
        }
    }
    j["coeffs"] = std::move(rows);
    return j;
}

inline SpectralField field_from_json(const nlohmann::json& j) {
    const auto& d = j.at("domain");
    SpectralField F(DomainSpec(d.at("x_period").get<double>(), d.at("n_x").get<int>(), d.at("n_y").get<int>(),
                               d.at("n_max").get<int>()));
    const auto& rows = j.at("coeffs");
    std::size_t idx = 0;
    for (int m = -F.domain.n_x / 2; m < F.domain.n_x / 2; ++m) {
        const int ix = m >= 0 ? m : m + F.domain.n_x;
        for (int k = -F.domain.n_y / 2; k < F.domain.n_y / 2; ++k, ++idx) {
            const int iy = k >= 0 ? k : k + F.domain.n_y;
            F.coeffs[static_cast<std::size_t>(ix) * F.domain.n_y + iy] =
                complexd(rows.at(idx).at(0).get<double>(), rows.at(idx).at(1).get<double>());
        }
    }
    return F;
}

// ---------------------------------------------------------------------
// CSV with pinned float formatting (%.12e) so identical inputs give
// byte-identical files.
// ---------------------------------------------------------------------

inline std::string fmt_e(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12e", v);
    return buf;
}

class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::vector<std::string>& header) : out_(path) {
        if (!out_) throw std::runtime_error("CsvWriter: cannot open " + path);
        for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
        out_ << "\n";
    }
    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
        out_ << "\n";
    }
    void close() { out_.close(); }

private:
    std::ofstream out_;
};

// FNV-1a 64-bit digest of a file's bytes (manifest integrity field)
inline std::string digest_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("digest_file: cannot open " + path);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    char buf[4096];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 0x100000001b3ULL;
        }
        if (!in) break;
    }
    char out[20];
    std::snprintf(out, sizeof(out), "%016llx", static_cast<unsigned long long>(h));
    return out;
}

inline void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_text_file: cannot open " + path);
    out << text;
    if (!out) throw std::runtime_error("write_text_file: write failure on " + path);
}

// JSON written through a temp file and renamed, used for the run manifest so
// its presence marks a completed run.
inline void write_json_atomic(const std::string& path, const nlohmann::json& j) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw std::runtime_error("write_json_atomic: cannot open " + tmp);
        out << j.dump(2) << "\n";
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace hnls
