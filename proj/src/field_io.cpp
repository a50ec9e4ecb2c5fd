#include "semiclassical/field_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>

#include "semiclassical/error.hpp"

namespace semiclassical::io {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

static_assert(std::endian::native == std::endian::little, "field payloads assume a little-endian host");

void write_doubles(const fs::path& path, const double* data, std::size_t count)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw FieldError("cannot open " + path.string() + " for writing");
    out.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(count * sizeof(double)));
    if (!out) throw FieldError("short write to " + path.string());
}

std::vector<double> read_doubles(const fs::path& path, std::size_t count)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FieldError("cannot open " + path.string());
    in.seekg(0, std::ios::end);
    const auto bytes = static_cast<std::size_t>(in.tellg());
    if (bytes != count * sizeof(double)) {
        throw FieldError(path.string() + ": expected " + std::to_string(count * sizeof(double)) + " bytes, found " +
                         std::to_string(bytes));
    }
    in.seekg(0);
    std::vector<double> v(count);
    in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(bytes));
    if (!in) throw FieldError("short read from " + path.string());
    return v;
}

void write_header(const fs::path& stem, const Grid& g, const char* dtype)
{
    json h = grid_to_json(g);
    h["dtype"] = dtype;
    h["count"] = g.size();
    std::ofstream out(header_path(stem), std::ios::trunc);
    if (!out) throw FieldError("cannot open " + header_path(stem).string() + " for writing");
    out << h.dump(2) << '\n';
}

json read_header(const fs::path& stem, const char* dtype)
{
    std::ifstream in(header_path(stem));
    if (!in) throw FieldError("cannot open " + header_path(stem).string());
    json h;
    try {
        h = json::parse(in);
    } catch (const json::exception& e) {
        throw FieldError(header_path(stem).string() + ": " + e.what());
    }
    if (h.value("dtype", "") != dtype) {
        throw FieldError(header_path(stem).string() + ": expected dtype " + dtype);
    }
    return h;
}

void csv_coords_header(std::ostream& os, const Grid& g)
{
    static const char* names[] = {"x", "y", "z"};
    for (int a = 0; a < g.dim(); ++a) os << names[a] << ',';
}

void csv_coords(std::ostream& os, const Grid& g, std::size_t node)
{
    const Point3 p = g.position(node);
    for (int a = 0; a < g.dim(); ++a) os << p[a] << ',';
}

}  // namespace

fs::path bin_path(const fs::path& stem) { return fs::path(stem.string() + ".bin"); }
fs::path header_path(const fs::path& stem) { return fs::path(stem.string() + ".json"); }

json grid_to_json(const Grid& g)
{
    return json{{"dim", g.dim()},
                {"extents", g.extents()},
                {"origin", g.origins()},
                {"spacing", g.spacings()},
                {"boundary", std::string(to_string(g.boundary()))}};
}

Grid grid_from_json(const json& j)
{
    try {
        const int dim = j.at("dim").get<int>();
        auto ext = j.at("extents").get<std::vector<std::size_t>>();
        auto org = j.at("origin").get<std::vector<double>>();
        auto h = j.at("spacing").get<std::vector<double>>();
        if (static_cast<int>(ext.size()) != dim) throw GridError("grid header: dim disagrees with extents");
        return Grid(std::move(ext), std::move(org), std::move(h),
                    boundary_from_string(j.at("boundary").get<std::string>()));
    } catch (const json::exception& e) {
        throw FieldError(std::string("malformed grid header: ") + e.what());
    }
}

void write_field(const fs::path& stem, const ScalarField& f)
{
    write_header(stem, f.grid(), "float64");
    write_doubles(bin_path(stem), f.values().data(), f.size());
}

void write_field(const fs::path& stem, const ComplexField& f)
{
    write_header(stem, f.grid(), "complex128");
    write_doubles(bin_path(stem), reinterpret_cast<const double*>(f.values().data()), 2 * f.size());
}

ScalarField read_scalar_field(const fs::path& stem)
{
    const json h = read_header(stem, "float64");
    Grid g = grid_from_json(h);
    return ScalarField(g, read_doubles(bin_path(stem), g.size()));
}

ComplexField read_complex_field(const fs::path& stem)
{
    const json h = read_header(stem, "complex128");
    Grid g = grid_from_json(h);
    const auto raw = read_doubles(bin_path(stem), 2 * g.size());
    std::vector<complex> v(g.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = {raw[2 * i], raw[2 * i + 1]};
    return ComplexField(g, std::move(v));
}

void write_csv(const fs::path& path, const ScalarField& f)
{
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw FieldError("cannot open " + path.string() + " for writing");
    out << std::setprecision(17);
    csv_coords_header(out, f.grid());
    out << "value\n";
    for (std::size_t i = 0; i < f.size(); ++i) {
        csv_coords(out, f.grid(), i);
        out << f[i] << '\n';
    }
}

void write_csv(const fs::path& path, const ComplexField& f)
{
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw FieldError("cannot open " + path.string() + " for writing");
    out << std::setprecision(17);
    csv_coords_header(out, f.grid());
    out << "re,im\n";
    for (std::size_t i = 0; i < f.size(); ++i) {
        csv_coords(out, f.grid(), i);
        out << f[i].real() << ',' << f[i].imag() << '\n';
    }
}

}  // namespace semiclassical::io
