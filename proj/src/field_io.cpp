#include "michell/field_io.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>

#include "michell/errors.hpp"

namespace michell {

namespace {

template <class T>
void put(std::ofstream& out, T v) {
    char b[sizeof(T)];
    std::memcpy(b, &v, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
    out.write(b, sizeof(T));
}

template <class T>
T get(std::ifstream& in) {
    char b[sizeof(T)];
    if (!in.read(b, sizeof(T))) throw InvalidInput("field file truncated");
    if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
    T v;
    std::memcpy(&v, b, sizeof(T));
    return v;
}

void write_header(std::ofstream& out, const char* magic, const Grid& g) {
    out.write(magic, 4);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(g.dim()));
    for (int a = 0; a < g.dim(); ++a) put<std::uint32_t>(out, static_cast<std::uint32_t>(g.cells(a)));
    for (int a = 0; a < g.dim(); ++a) put<double>(out, g.spacing(a));
    for (int a = 0; a < g.dim(); ++a) put<double>(out, g.lo(a));
}

Grid read_header(std::ifstream& in, const char* magic) {
    char m[4];
    if (!in.read(m, 4) || std::memcmp(m, magic, 4) != 0)
        throw InvalidInput(std::string("field file does not start with ") + magic);
    const int n = static_cast<int>(get<std::uint32_t>(in));
    if (n != 2 && n != 3) throw InvalidInput("field file: bad dimension");
    std::array<int, 3> cells{1, 1, 1};
    std::array<double, 3> h{1, 1, 1}, lo{}, hi{1, 1, 1};
    for (int a = 0; a < n; ++a) cells[a] = static_cast<int>(get<std::uint32_t>(in));
    for (int a = 0; a < n; ++a) h[a] = get<double>(in);
    for (int a = 0; a < n; ++a) lo[a] = get<double>(in);
    for (int a = 0; a < n; ++a) hi[a] = lo[a] + h[a] * cells[a];
    return Grid(n, cells, lo, hi);
}

std::ofstream open_out(const std::string& path, std::ios::openmode mode) {
    std::ofstream out(path, mode);
    if (!out) throw InvalidInput("cannot write '" + path + "'");
    return out;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidInput("cannot read '" + path + "'");
    return in;
}

void write_array(std::ofstream& out, const std::vector<double>& v) {
    for (double x : v) put<double>(out, x);
}

void read_array(std::ifstream& in, std::vector<double>& v) {
    for (double& x : v) x = get<double>(in);
}

void csv_rows(std::FILE* f, const char* name, const Lattice& l, const std::vector<double>& v, int dim) {
    for (std::size_t i = 0; i < l.size(); ++i) {
        const auto p = l.coords(i);
        std::fprintf(f, "%s", name);
        for (int a = 0; a < dim; ++a) std::fprintf(f, ",%.17g", l.position(a, p[a]));
        std::fprintf(f, ",%.17g\n", v[i]);
    }
}

std::FILE* open_csv(const std::string& path, int dim) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw InvalidInput("cannot write '" + path + "'");
    std::fprintf(f, dim == 2 ? "component,x,y,value\n" : "component,x,y,z,value\n");
    return f;
}

const char* kStressNames[] = {"s11", "s22", "s33"};
const char* kShearNames[] = {"s12", "s13", "s23"};
const char* kVectorNames[] = {"v1", "v2", "v3"};

}  // namespace

void write_field_binary(const std::string& path, const StressField& f) {
    auto out = open_out(path, std::ios::binary);
    write_header(out, "MSF1", f.grid());
    for (int c = 0; c < f.num_components(); ++c) write_array(out, f.component(c));
    if (!out) throw InvalidInput("write failed for '" + path + "'");
}

void write_field_binary(const std::string& path, const VectorField& f) {
    auto out = open_out(path, std::ios::binary);
    write_header(out, "MVF1", f.grid());
    for (int a = 0; a < f.grid().dim(); ++a) write_array(out, f.component(a));
    if (!out) throw InvalidInput("write failed for '" + path + "'");
}

StressField read_stress_binary(const std::string& path) {
    auto in = open_in(path);
    StressField f(read_header(in, "MSF1"));
    for (int c = 0; c < f.num_components(); ++c) read_array(in, f.component(c));
    return f;
}

VectorField read_vector_binary(const std::string& path) {
    auto in = open_in(path);
    VectorField f(read_header(in, "MVF1"));
    for (int a = 0; a < f.grid().dim(); ++a) read_array(in, f.component(a));
    return f;
}

void write_field_csv(const std::string& path, const StressField& f) {
    const int n = f.grid().dim();
    std::FILE* out = open_csv(path, n);
    for (int c = 0; c < f.num_components(); ++c) {
        const char* name = c < n ? kStressNames[c] : kShearNames[c - n];
        csv_rows(out, name, f.component_lattice(c), f.component(c), n);
    }
    std::fclose(out);
}

void write_field_csv(const std::string& path, const VectorField& f) {
    const int n = f.grid().dim();
    std::FILE* out = open_csv(path, n);
    for (int a = 0; a < n; ++a) csv_rows(out, kVectorNames[a], f.grid().face_lattice(a), f.component(a), n);
    std::fclose(out);
}

}  // namespace michell
