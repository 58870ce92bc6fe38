#include "mfl/io.hpp"

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace mfl {

namespace {
constexpr char magic[4] = {'M', 'F', 'L', 'B'};
}

void save_field(const Field& f, const std::string& path) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw std::runtime_error("save_field: cannot open " + tmp);
        std::uint32_t version = 1, dim = (std::uint32_t)f.grid.dim, reserved = 0;
        std::uint64_t M = (std::uint64_t)f.grid.M;
        double L = f.grid.L;
        os.write(magic, 4);
        os.write(reinterpret_cast<const char*>(&version), 4);
        os.write(reinterpret_cast<const char*>(&dim), 4);
        os.write(reinterpret_cast<const char*>(&reserved), 4);
        os.write(reinterpret_cast<const char*>(&M), 8);
        os.write(reinterpret_cast<const char*>(&L), 8);
        os.write(reinterpret_cast<const char*>(f.data()), (std::streamsize)(f.size() * sizeof(cplx)));
        if (!os) throw std::runtime_error("save_field: write failed for " + tmp);
    }
    std::filesystem::rename(tmp, path);
}

Field load_field(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("load_field: cannot open " + path);
    char mg[4];
    std::uint32_t version, dim, reserved;
    std::uint64_t M;
    double L;
    is.read(mg, 4);
    is.read(reinterpret_cast<char*>(&version), 4);
    is.read(reinterpret_cast<char*>(&dim), 4);
    is.read(reinterpret_cast<char*>(&reserved), 4);
    is.read(reinterpret_cast<char*>(&M), 8);
    is.read(reinterpret_cast<char*>(&L), 8);
    if (!is || std::memcmp(mg, magic, 4) != 0) throw std::runtime_error("load_field: bad header");
    if (version != 1) throw std::runtime_error("load_field: unsupported version");
    Grid g((int)dim, (int)M, L);
    Field f(g);
    is.read(reinterpret_cast<char*>(f.data()), (std::streamsize)(f.size() * sizeof(cplx)));
    if (!is) throw std::runtime_error("load_field: truncated payload");
    return f;
}

void atomic_write_text(const std::string& path, const std::string& text) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw std::runtime_error("atomic_write_text: cannot open " + tmp);
        os << text;
        if (!os) throw std::runtime_error("atomic_write_text: write failed for " + tmp);
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace mfl
