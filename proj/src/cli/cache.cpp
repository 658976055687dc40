#include "hypfrac/cli.hpp"
#include "hypfrac/errors.hpp"

#include "json.hpp"

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

namespace hypfrac::cli {

namespace {

constexpr char forms_magic[8] = {'H', 'Y', 'P', 'F', 'O', 'R', 'M', 'S'};
constexpr std::uint32_t forms_version = 1;

void fnv_mix(std::uint64_t& h, const void* p, std::size_t len) {
    const auto* c = static_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < len; ++i) {
        h ^= c[i];
        h *= 1099511628211ull;
    }
}

template <class T>
void put(std::string& buf, const T& v) {
    buf.append(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
bool get(std::istream& is, T& v) {
    return bool(is.read(reinterpret_cast<char*>(&v), sizeof v));
}

std::string read_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) return {};
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

}  // namespace

const std::vector<double> mixed_constant_widths{0.01, 0.014, 0.02, 0.028, 0.04, 0.056, 0.08, 0.11};

std::uint64_t cache_key(int N, double s, std::uint64_t grid_hash, const std::vector<double>& extra) {
    std::uint64_t h = 1469598103934665603ull;
    fnv_mix(h, &N, sizeof N);
    fnv_mix(h, &s, sizeof s);
    fnv_mix(h, &grid_hash, sizeof grid_hash);
    for (double x : extra) fnv_mix(h, &x, sizeof x);
    return h;
}

std::string hex(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::string resolve_cache_dir(const std::string& configured) {
    const char* env = std::getenv("HYPFRAC_CACHE");
    return env && *env ? std::string(env) : configured;
}

void write_atomic(const std::string& path, const std::string& content) {
    namespace stdfs = std::filesystem;
    const stdfs::path target(path);
    if (target.has_parent_path()) stdfs::create_directories(target.parent_path());
    const std::string tmp = path + ".tmp." + std::to_string(::getpid());
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw std::runtime_error("cannot write " + tmp);
        os.write(content.data(), std::streamsize(content.size()));
        if (!os.flush()) throw std::runtime_error("cannot write " + tmp);
    }
    stdfs::rename(tmp, target);
}

void save_forms(const std::string& path, const fs::QuadraticForms& f) {
    const std::uint64_t n = std::uint64_t(f.stiffness.rows());
    std::string buf(forms_magic, sizeof forms_magic);
    put(buf, forms_version);
    put(buf, std::int32_t(f.N));
    put(buf, f.s);
    put(buf, f.grid_hash);
    put(buf, n);
    for (const Eigen::MatrixXd* m : {&f.stiffness, &f.mass, &f.nonlocal, &f.nonlocal_interior, &f.nonlocal_tail})
        buf.append(reinterpret_cast<const char*>(m->data()), n * n * sizeof(double));
    write_atomic(path, buf);
}

std::optional<fs::QuadraticForms> load_forms(const std::string& path, int N, double s, std::uint64_t grid_hash) {
    std::ifstream is(path, std::ios::binary);
    if (!is) return std::nullopt;
    char magic[sizeof forms_magic];
    std::uint32_t version = 0;
    std::int32_t n_dim = 0;
    double order = 0.0;
    std::uint64_t gh = 0, n = 0;
    if (!is.read(magic, sizeof magic) || std::memcmp(magic, forms_magic, sizeof magic) != 0) return std::nullopt;
    if (!get(is, version) || !get(is, n_dim) || !get(is, order) || !get(is, gh) || !get(is, n)) return std::nullopt;
    if (version != forms_version || n_dim != N || order != s || gh != grid_hash || n == 0 || n > 100000)
        return std::nullopt;
    fs::QuadraticForms f;
    f.N = N;
    f.s = s;
    f.grid_hash = grid_hash;
    for (Eigen::MatrixXd* m : {&f.stiffness, &f.mass, &f.nonlocal, &f.nonlocal_interior, &f.nonlocal_tail}) {
        m->resize(Eigen::Index(n), Eigen::Index(n));
        if (!is.read(reinterpret_cast<char*>(m->data()), std::streamsize(n * n * sizeof(double)))) return std::nullopt;
    }
    if (is.peek() != std::char_traits<char>::eof()) return std::nullopt;
    return f;
}

FormsCache::FormsCache(std::string dir) : dir_(std::move(dir)) {}

const fs::QuadraticForms& FormsCache::forms(const fs::RadialGrid& grid, double s) {
    const std::uint64_t gh = grid.hash();
    const std::uint64_t key = cache_key(grid.N, s, gh);
    if (auto it = forms_.find(key); it != forms_.end()) {
        ++hits;
        return *it->second;
    }
    std::optional<fs::QuadraticForms> loaded;
    std::string path;
    if (!dir_.empty()) {
        path = (std::filesystem::path(dir_) / ("forms_" + hex(key) + ".bin")).string();
        const bool present = std::filesystem::exists(path);
        loaded = load_forms(path, grid.N, s, gh);
        if (loaded) {
            try {
                fs::check_forms(grid, *loaded);
            } catch (const ValidationError&) {
                loaded.reset();
            }
        }
        if (present && !loaded) ++stale;
    }
    if (loaded) {
        ++hits;
    } else {
        ++misses;
        loaded = fs::assemble_forms(grid, s);
        if (!dir_.empty()) {
            save_forms(path, *loaded);
            nlohmann::json side{{"format_version", forms_version},
                                {"N", grid.N},
                                {"s", s},
                                {"grid_hash", hex(gh)},
                                {"node_count", grid.size()},
                                {"R_max", grid.R_max()},
                                {"matrices", {"stiffness", "mass", "nonlocal", "nonlocal_interior", "nonlocal_tail"}},
                                {"layout", "column-major float64, native byte order"}};
            write_atomic(path.substr(0, path.size() - 4) + ".json", side.dump(2) + "\n");
        }
    }
    return *forms_.emplace(key, std::make_unique<fs::QuadraticForms>(std::move(*loaded))).first->second;
}

double FormsCache::mixed_constant(std::shared_ptr<const fs::RadialGrid> grid, double lambda,
                                  const fs::QuadraticForms& forms) {
    std::vector<double> extra{lambda};
    extra.insert(extra.end(), mixed_constant_widths.begin(), mixed_constant_widths.end());
    const std::uint64_t key = cache_key(grid->N, forms.s, grid->hash(), extra);
    if (auto it = constants_.find(key); it != constants_.end()) {
        ++hits;
        return it->second;
    }
    std::string path;
    if (!dir_.empty()) {
        path = (std::filesystem::path(dir_) / ("mixed_" + hex(key) + ".json")).string();
        const std::string text = read_file(path);
        if (!text.empty()) {
            try {
                const auto j = nlohmann::json::parse(text);
                if (j.at("N") == grid->N && j.at("s") == forms.s && j.at("lambda") == lambda &&
                    j.at("grid_hash") == hex(grid->hash()) && j.at("widths") == mixed_constant_widths) {
                    ++hits;
                    return constants_[key] = j.at("value").get<double>();
                }
            } catch (const nlohmann::json::exception&) {
            }
            ++stale;
        }
    }
    ++misses;
    const double v = fs::estimate_mixed_constant(grid, lambda, forms, mixed_constant_widths).value;
    if (!dir_.empty()) {
        nlohmann::json j{{"N", grid->N},         {"s", forms.s},
                         {"lambda", lambda},     {"grid_hash", hex(grid->hash())},
                         {"widths", mixed_constant_widths}, {"value", v}};
        write_atomic(path, j.dump(2) + "\n");
    }
    return constants_[key] = v;
}

}  // namespace hypfrac::cli
