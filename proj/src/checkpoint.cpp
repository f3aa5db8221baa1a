#include "spnlab/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>

#include "spnlab/error.hpp"

namespace spnlab {

static_assert(std::endian::native == std::endian::little,
              "checkpoint writer assumes a little-endian host");

namespace {

constexpr char kMagic[8] = {'S', 'P', 'N', 'C', 'K', 'P', 'T', '1'};

void write_u32(std::ostream& os, uint32_t v) {
    os.write(reinterpret_cast<const char*>(&v), 4);
}

uint32_t read_u32(std::istream& is, const std::string& path) {
    uint32_t v = 0;
    if (!is.read(reinterpret_cast<char*>(&v), 4))
        throw TruncatedFileError("checkpoint truncated: " + path);
    return v;
}

}  // namespace

void save_checkpoint(const std::string& path, const ParamList& params) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open checkpoint for writing: " + path);
    os.write(kMagic, 8);
    for (const auto& p : params) {
        write_u32(os, static_cast<uint32_t>(p.name.size()));
        os.write(p.name.data(), static_cast<std::streamsize>(p.name.size()));
        const auto& shape = p.tensor.shape();
        write_u32(os, static_cast<uint32_t>(shape.size()));
        for (int d : shape) write_u32(os, static_cast<uint32_t>(d));
        os.write(reinterpret_cast<const char*>(p.tensor.data().data()),
                 static_cast<std::streamsize>(p.tensor.data().size() * sizeof(float)));
    }
    if (!os) throw IoError("checkpoint write failed: " + path);
}

void load_checkpoint(const std::string& path, ParamList& params) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open checkpoint: " + path);
    char magic[8];
    if (!is.read(magic, 8)) throw TruncatedFileError("checkpoint truncated: " + path);
    if (std::memcmp(magic, kMagic, 8) != 0)
        throw CorruptMagicError("bad checkpoint magic in " + path);

    std::map<std::string, Param*> by_name;
    for (auto& p : params) by_name[p.name] = &p;
    size_t loaded = 0;

    while (true) {
        uint32_t name_len = 0;
        if (!is.read(reinterpret_cast<char*>(&name_len), 4)) break;  // clean EOF
        std::string name(name_len, '\0');
        if (!is.read(name.data(), name_len)) throw TruncatedFileError("checkpoint truncated: " + path);
        uint32_t rank = read_u32(is, path);
        Shape shape(rank);
        int64_t numel = 1;
        for (uint32_t i = 0; i < rank; ++i) {
            shape[i] = static_cast<int>(read_u32(is, path));
            numel *= shape[i];
        }
        auto it = by_name.find(name);
        if (it == by_name.end())
            throw IoError("checkpoint parameter '" + name + "' not present in model");
        Param& p = *it->second;
        if (p.tensor.shape() != shape)
            throw IoError("checkpoint parameter '" + name + "' has shape " + shape_str(shape) +
                          ", model expects " + shape_str(p.tensor.shape()));
        if (!is.read(reinterpret_cast<char*>(p.tensor.data().data()),
                     static_cast<std::streamsize>(numel * sizeof(float))))
            throw TruncatedFileError("checkpoint truncated: " + path);
        ++loaded;
    }
    if (loaded != params.size())
        throw IoError("checkpoint " + path + " holds " + std::to_string(loaded) +
                      " parameters, model expects " + std::to_string(params.size()));
}

}  // namespace spnlab
