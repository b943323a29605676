#include "process_description.hpp"

#include <cmath>
#include <set>
#include <vector>

#include "polqpt/process_gen.hpp"

namespace polqpt::cli {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& message) {
    throw DescriptionError("field '" + path + "': " + message);
}

void allow_only(const json& obj, const std::string& path, std::initializer_list<const char*> keys) {
    const std::set<std::string> allowed(keys.begin(), keys.end());
    for (const auto& [key, value] : obj.items()) {
        if (!allowed.contains(key)) fail(path.empty() ? key : path + "." + key, "unknown field");
    }
}

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

double number(const json& obj, const std::string& path, const char* key, std::optional<double> fallback = {}) {
    if (!obj.contains(key)) {
        if (fallback) return *fallback;
        fail(join(path, key), "required");
    }
    const json& v = obj.at(key);
    if (!v.is_number()) fail(join(path, key), "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) fail(join(path, key), "must be finite");
    return d;
}

std::uint64_t unsigned_int(const json& obj, const std::string& path, const char* key,
                           std::optional<std::uint64_t> fallback = {}) {
    if (!obj.contains(key)) {
        if (fallback) return *fallback;
        fail(join(path, key), "required");
    }
    const json& v = obj.at(key);
    if (!v.is_number_unsigned()) fail(join(path, key), "expected a non-negative integer");
    return v.get<std::uint64_t>();
}

std::size_t grid_size(const json& obj) {
    const auto n = unsigned_int(obj, "", "n_pixels");
    if (n < 2 || n > 4096) fail("n_pixels", "must lie in [2, 4096]");
    return static_cast<std::size_t>(n);
}

std::string string_field(const json& obj, const std::string& path, const char* key) {
    if (!obj.contains(key)) fail(join(path, key), "required");
    if (!obj.at(key).is_string()) fail(join(path, key), "expected a string");
    return obj.at(key).get<std::string>();
}

Plate parse_plate(const json& p, const std::string& path) {
    if (!p.is_object()) fail(path, "expected an object");
    const std::string type = string_field(p, path, "type");
    Plate plate;
    if (type == "uniform") {
        allow_only(p, path, {"type", "delta", "alpha0"});
        plate = Plate::uniform(number(p, path, "delta"), number(p, path, "alpha0", 0.0));
    } else if (type == "g_plate_x" || type == "g_plate_y") {
        allow_only(p, path, {"type", "delta", "lambda", "alpha0"});
        const double lambda = number(p, path, "lambda");
        if (!(lambda > 0.0)) fail(join(path, "lambda"), "must be positive");
        plate = type == "g_plate_x" ? Plate::grating_x(number(p, path, "delta"), lambda)
                                    : Plate::grating_y(number(p, path, "delta"), lambda);
        plate.alpha0 = number(p, path, "alpha0", 0.0);
    } else if (type == "q_plate") {
        allow_only(p, path, {"type", "delta", "q", "alpha0"});
        plate = Plate::q_plate(number(p, path, "delta"), number(p, path, "q"));
        plate.alpha0 = number(p, path, "alpha0", 0.0);
    } else {
        fail(join(path, "type"), "unknown plate type '" + type + "' (uniform, g_plate_x, g_plate_y, q_plate)");
    }
    return plate;
}

Window parse_window(const json& w, const std::vector<Plate>& plates) {
    if (w.is_null()) return Window::around(plates);
    if (!w.is_object()) fail("window", "expected an object");
    if (w.contains("half_width")) {
        allow_only(w, "window", {"half_width"});
        const double h = number(w, "window", "half_width");
        if (!(h > 0.0)) fail("window.half_width", "must be positive");
        return Window::square(h);
    }
    allow_only(w, "window", {"x_min", "x_max", "y_min", "y_max"});
    Window win{number(w, "window", "x_min"), number(w, "window", "x_max"), number(w, "window", "y_min"),
               number(w, "window", "y_max")};
    if (!(win.x_max > win.x_min) || !(win.y_max > win.y_min)) fail("window", "empty extent");
    return win;
}

std::optional<NoiseSettings> parse_noise(const json& root) {
    if (!root.contains("noise")) return std::nullopt;
    const json& n = root.at("noise");
    if (!n.is_object()) fail("noise", "expected an object");
    allow_only(n, "noise", {"sigma", "seed"});
    NoiseSettings noise{number(n, "noise", "sigma"), unsigned_int(n, "noise", "seed", 0)};
    if (noise.sigma < 0.0) fail("noise.sigma", "must be non-negative");
    return noise;
}

std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t byte) {
    std::size_t line = 1;
    std::size_t column = 1;
    for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            column = 1;
        } else {
            ++column;
        }
    }
    return {line, column};
}

}  // namespace

ProcessDescription parse_process_description(std::string_view text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        const auto [line, column] = line_column(text, e.byte);
        std::string what = e.what();
        // nlohmann prefixes "[json.exception.parse_error.101] parse error at line L, column C: ".
        if (const auto colon = what.find(": "); colon != std::string::npos) what = what.substr(colon + 2);
        throw DescriptionError("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what);
    }
    if (!root.is_object()) throw DescriptionError("top level must be a JSON object");

    ProcessDescription desc;
    desc.source = root;
    desc.kind = string_field(root, "", "kind");
    desc.noise = parse_noise(root);

    if (desc.kind == "identity") {
        allow_only(root, "", {"kind", "n_pixels", "noise"});
        desc.map = canonicalize_sign(ProcessMap(grid_size(root)));
        desc.generator_kind = "fourier";
    } else if (desc.kind == "uniform") {
        allow_only(root, "", {"kind", "n_pixels", "theta", "axis", "noise"});
        const double theta = number(root, "", "theta");
        if (theta < 0.0 || theta > kPi) fail("theta", "must lie in [0, pi]");
        if (!root.contains("axis")) fail("axis", "required");
        const json& a = root.at("axis");
        if (!a.is_array() || a.size() != 3 || !a[0].is_number() || !a[1].is_number() || !a[2].is_number()) {
            fail("axis", "expected three numbers");
        }
        Vec3 axis{a[0].get<double>(), a[1].get<double>(), a[2].get<double>()};
        const double norm = axis.norm();
        if (!(norm > 1e-12) || !std::isfinite(norm)) fail("axis", "must be a non-zero finite vector");
        axis = {axis.x / norm, axis.y / norm, axis.z / norm};
        desc.map = canonicalize_sign(ProcessMap::uniform(grid_size(root), {theta, axis}));
        desc.generator_kind = "fourier";
    } else if (desc.kind == "fourier") {
        allow_only(root, "", {"kind", "n_pixels", "seed", "max_omega", "xi_max_deg", "noise"});
        GeneratorConfig cfg;
        cfg.n_pixels = grid_size(root);
        const auto omega = unsigned_int(root, "", "max_omega", 5);
        if (omega > 5) fail("max_omega", "must lie in [0, 5]");
        cfg.max_omega = static_cast<int>(omega);
        const double xi_deg = number(root, "", "xi_max_deg", 5.0);
        if (xi_deg < 0.0) fail("xi_max_deg", "must be non-negative");
        cfg.xi_max = xi_deg * kPi / 180.0;
        desc.map = random_process(cfg, unsigned_int(root, "", "seed"));
        desc.generator_kind = "fourier";
    } else if (desc.kind == "single_plate") {
        allow_only(root, "", {"kind", "n_pixels", "seed", "noise"});
        desc.map = single_plate_random(unsigned_int(root, "", "seed"), grid_size(root));
        desc.generator_kind = "plate";
    } else if (desc.kind == "grating_stack") {
        allow_only(root, "", {"kind", "n_pixels", "stack", "lambda", "noise"});
        const std::string stack = string_field(root, "", "stack");
        const double lambda = number(root, "", "lambda", 1.0);
        if (!(lambda > 0.0)) fail("lambda", "must be positive");
        std::vector<Plate> plates;
        if (stack == "three_plate") {
            plates = three_plate_grating_stack(lambda);
        } else if (stack == "six_plate") {
            plates = six_plate_grating_stack(lambda);
        } else {
            fail("stack", "unknown stack '" + stack + "' (three_plate, six_plate)");
        }
        desc.map = plate_process(plates, grid_size(root), Window::square(lambda));
        desc.generator_kind = "plate";
    } else if (desc.kind == "plates") {
        allow_only(root, "", {"kind", "n_pixels", "plates", "window", "noise"});
        if (!root.contains("plates")) fail("plates", "required");
        const json& list = root.at("plates");
        if (!list.is_array()) fail("plates", "expected an array");
        if (list.empty()) fail("plates", "must contain at least one plate");
        std::vector<Plate> plates;
        for (std::size_t i = 0; i < list.size(); ++i) {
            plates.push_back(parse_plate(list[i], "plates[" + std::to_string(i) + "]"));
        }
        const Window window = parse_window(root.contains("window") ? root.at("window") : json(), plates);
        desc.map = plate_process(plates, grid_size(root), window);
        desc.generator_kind = "plate";
    } else {
        fail("kind", "unknown kind '" + desc.kind + "' (identity, uniform, fourier, single_plate, grating_stack, plates)");
    }
    return desc;
}

}  // namespace polqpt::cli
