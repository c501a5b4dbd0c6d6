#include "porovox/volume_io.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace porovox {

namespace {

using nlohmann::json;

std::string strip_json_ext(const std::string& path) {
    if (path.size() > 5 && path.ends_with(".json")) return path.substr(0, path.size() - 5);
    return path;
}

json read_header(const std::string& path, std::string& dir) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open header: " + path);
    dir = std::filesystem::path(path).parent_path().string();
    json j;
    in >> j;
    return j;
}

void parse_grid(const json& j, std::array<int, 3>& dims, std::array<double, 3>& spacing) {
    auto jd = j.at("dims");
    auto js = j.at("spacing_um");
    if (jd.size() != 3 || js.size() != 3)
        throw std::runtime_error("header: dims/spacing_um must have 3 entries");
    for (int a = 0; a < 3; ++a) {
        dims[a] = jd[a].get<int>();
        spacing[a] = js[a].get<double>();
        if (dims[a] <= 0) throw std::runtime_error("header: non-positive dim");
        if (spacing[a] <= 0) throw std::runtime_error("header: non-positive spacing");
    }
    if (j.at("order").get<std::string>() != "xyz")
        throw std::runtime_error("header: unsupported order (want xyz)");
}

std::string payload_path(const json& j, const std::string& dir) {
    auto file = j.at("data_file").get<std::string>();
    if (dir.empty()) return file;
    return (std::filesystem::path(dir) / file).string();
}

template <typename T>
std::vector<T> read_payload(const std::string& path, std::size_t n) {
    std::ifstream raw(path, std::ios::binary);
    if (!raw) throw std::runtime_error("cannot open payload: " + path);
    raw.seekg(0, std::ios::end);
    const auto bytes = static_cast<std::size_t>(raw.tellg());
    if (bytes != n * sizeof(T))
        throw std::runtime_error("payload length mismatch in " + path + ": got " +
                                 std::to_string(bytes) + " bytes, expected " +
                                 std::to_string(n * sizeof(T)));
    raw.seekg(0);
    std::vector<T> out(n);
    raw.read(reinterpret_cast<char*>(out.data()), static_cast<std::streamsize>(bytes));
    if (!raw) throw std::runtime_error("short read: " + path);
    return out;
}

template <typename T>
void write_pair(const json& header, const T* data, std::size_t n, const std::string& path) {
    const std::string base = strip_json_ext(path);
    {
        std::ofstream out(base + ".json");
        if (!out) throw std::runtime_error("cannot write header: " + base + ".json");
        out << header.dump(2) << "\n";
        if (!out) throw std::runtime_error("write failed: " + base + ".json");
    }
    {
        std::ofstream raw(base + ".raw", std::ios::binary);
        if (!raw) throw std::runtime_error("cannot write payload: " + base + ".raw");
        raw.write(reinterpret_cast<const char*>(data),
                  static_cast<std::streamsize>(n * sizeof(T)));
        if (!raw) throw std::runtime_error("write failed: " + base + ".raw");
    }
}

json make_header(const std::array<int, 3>& dims, const std::array<double, 3>& spacing,
                 const char* dtype, const std::string& path) {
    const std::string stem =
        std::filesystem::path(strip_json_ext(path)).filename().string();
    json j;
    j["dims"] = dims;
    j["spacing_um"] = spacing;
    j["dtype"] = dtype;
    j["order"] = "xyz";
    j["data_file"] = stem + ".raw";
    return j;
}

} // namespace

Volume load_volume(const std::string& path) {
    std::string dir;
    const json j = read_header(path, dir);
    if (j.at("dtype").get<std::string>() != "f32")
        throw std::runtime_error("load_volume: dtype is not f32");
    Volume v;
    parse_grid(j, v.dims, v.spacing);
    v.data = read_payload<float>(payload_path(j, dir), static_cast<std::size_t>(v.dims[0]) *
                                                           v.dims[1] * v.dims[2]);
    for (float x : v.data)
        if (!std::isfinite(x)) throw std::runtime_error("load_volume: non-finite payload");
    return v;
}

void save_volume(const Volume& v, const std::string& path) {
    write_pair(make_header(v.dims, v.spacing, "f32", path), v.data.data(), v.data.size(),
               path);
}

Mask load_mask(const std::string& path) {
    std::string dir;
    const json j = read_header(path, dir);
    if (j.at("dtype").get<std::string>() != "u8")
        throw std::runtime_error("load_mask: dtype is not u8");
    Mask m;
    parse_grid(j, m.dims, m.spacing);
    m.data = read_payload<std::uint8_t>(
        payload_path(j, dir), static_cast<std::size_t>(m.dims[0]) * m.dims[1] * m.dims[2]);
    for (auto x : m.data)
        if (x > 1) throw std::runtime_error("load_mask: values must be 0/1");
    return m;
}

void save_mask(const Mask& m, const std::string& path) {
    write_pair(make_header(m.dims, m.spacing, "u8", path), m.data.data(), m.data.size(),
               path);
}

} // namespace porovox
