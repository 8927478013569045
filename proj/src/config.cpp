#include "vpocc/config.hpp"

#include "vpocc/errors.hpp"

#include <fstream>
#include <sstream>
#include <vector>

namespace vpocc {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) {
        return "";
    }
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

std::vector<double> parse_reals(const std::string& value, std::size_t expected,
                                const std::string& key) {
    std::vector<double> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            out.push_back(std::stod(trim(item)));
        } catch (const std::exception&) {
            throw IoError("config: bad value for " + key);
        }
    }
    if (out.size() != expected) {
        throw IoError("config: " + key + " expects " + std::to_string(expected) +
                      " comma-separated values");
    }
    return out;
}

double parse_real(const std::string& value, const std::string& key) {
    return parse_reals(value, 1, key)[0];
}

long long parse_int(const std::string& value, const std::string& key) {
    try {
        std::size_t pos = 0;
        const long long v = std::stoll(trim(value), &pos);
        if (pos != trim(value).size()) {
            throw std::invalid_argument("trailing");
        }
        return v;
    } catch (const std::exception&) {
        throw IoError("config: bad value for " + key);
    }
}

} // namespace

RunConfig load_config_file(const std::string& path, RunConfig base) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open config file: " + path);
    }
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw IoError("config: line " + std::to_string(line_no) + " is not key=value");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));

        if (key == "alpha") {
            base.alpha = parse_real(value, key);
        } else if (key == "beta") {
            base.beta = parse_real(value, key);
        } else if (key == "scale_factors") {
            const auto v = parse_reals(value, 3, key);
            base.scale_factors = {v[0], v[1], v[2]};
        } else if (key == "offset_exponent") {
            base.offset_exponent = parse_real(value, key);
        } else if (key == "seed") {
            base.seed = static_cast<std::uint64_t>(parse_int(value, key));
        } else if (key == "channels") {
            base.channels = static_cast<int>(parse_int(value, key));
        } else if (key == "num_classes") {
            base.num_classes = static_cast<int>(parse_int(value, key));
        } else if (key == "threads") {
            base.threads = static_cast<int>(parse_int(value, key));
        } else if (key == "grid_dims") {
            const auto v = parse_reals(value, 3, key);
            base.grid.nx = static_cast<int>(v[0]);
            base.grid.ny = static_cast<int>(v[1]);
            base.grid.nz = static_cast<int>(v[2]);
        } else if (key == "voxel_size") {
            const auto v = parse_reals(value, 3, key);
            base.grid.voxel_size = {v[0], v[1], v[2]};
        } else if (key == "grid_origin") {
            const auto v = parse_reals(value, 3, key);
            base.grid.origin = {v[0], v[1], v[2]};
        } else {
            throw IoError("config: unknown key '" + key + "' on line " +
                          std::to_string(line_no));
        }
    }
    return base;
}

} // namespace vpocc
