// SPDX-License-Identifier: Apache-2.0

#include "edgewave/scene_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace edgewave {

namespace {

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

int parse_obj_index(const std::string& tok, size_t n_vertices) {
    // accept v, v/vt, v/vt/vn, v//vn
    std::string head = tok.substr(0, tok.find('/'));
    int idx = std::stoi(head);
    if (idx < 0) idx = static_cast<int>(n_vertices) + idx + 1;
    if (idx < 1 || idx > static_cast<int>(n_vertices)) {
        throw std::runtime_error("OBJ: vertex index out of range: " + tok);
    }
    return idx - 1;
}

}  // namespace

LoadedScene load_obj(const std::string& path,
                     const std::map<std::string, int>& material_index) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open scene file " + path);
    LoadedScene out;
    int current_material = 0;
    std::string line;
    while (std::getline(f, line)) {
        std::istringstream ss(trim(line));
        std::string tag;
        if (!(ss >> tag) || tag.empty() || tag[0] == '#') continue;
        if (tag == "v") {
            Vec3 p;
            if (!(ss >> p.x >> p.y >> p.z)) throw std::runtime_error("OBJ: bad v line");
            out.mesh.vertices.push_back(p);
        } else if (tag == "usemtl") {
            std::string name;
            ss >> name;
            auto it = material_index.find(name);
            current_material = it == material_index.end() ? 0 : it->second;
        } else if (tag == "f") {
            std::vector<int> idx;
            std::string tok;
            while (ss >> tok) idx.push_back(parse_obj_index(tok, out.mesh.vertices.size()));
            if (idx.size() < 3) throw std::runtime_error("OBJ: face with < 3 vertices");
            // triangulated input expected; fan larger faces defensively? No:
            // the format contract is triangles, reject anything else
            if (idx.size() != 3) {
                throw std::runtime_error("OBJ: non-triangulated face");
            }
            out.mesh.triangles.push_back({idx[0], idx[1], idx[2], current_material});
        }
        // vn/vt/o/g/s/mtllib lines are ignored
    }
    return out;
}

namespace {

BoundaryCondition parse_bc(const std::string& v) {
    if (v == "dirichlet") return BoundaryCondition::Dirichlet;
    if (v == "neumann") return BoundaryCondition::Neumann;
    throw std::runtime_error("config: unknown boundary condition '" + v + "'");
}

}  // namespace

int ParsedConfig::material_index(const std::string& name) const {
    for (size_t i = 0; i < materials.size(); ++i) {
        if (materials[i].first == name) return static_cast<int>(i);
    }
    return 0;
}

ParsedConfig parse_config(const std::string& text) {
    ParsedConfig out;
    std::istringstream ss(text);
    std::string line;
    std::string section = "simulation";
    std::string mat_name;
    while (std::getline(ss, line)) {
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw std::runtime_error("config: bad section " + line);
            std::string inside = trim(line.substr(1, line.size() - 2));
            if (inside == "simulation") {
                section = "simulation";
            } else if (inside.rfind("material", 0) == 0) {
                section = "material";
                mat_name = trim(inside.substr(8));
                if (mat_name.empty()) throw std::runtime_error("config: unnamed material");
                bool found = false;
                for (auto& [n, m] : out.materials) found |= n == mat_name;
                if (!found) out.materials.emplace_back(mat_name, Material{});
            } else {
                throw std::runtime_error("config: unknown section " + inside);
            }
            continue;
        }
        size_t eq = line.find('=');
        if (eq == std::string::npos) throw std::runtime_error("config: expected key = value: " + line);
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        if (section == "simulation") {
            SimulationConfig& c = out.simulation;
            if (key == "sound_speed") c.sound_speed = std::stod(val);
            else if (key == "air_density") c.air_density = std::stod(val);
            else if (key == "source_energy") c.source_energy = std::stod(val);
            else if (key == "absorption") c.absorption = std::stod(val);
            else if (key == "samples") c.samples = std::stoi(val);
            else if (key == "max_diffraction_order") c.max_diffraction_order = std::stoi(val);
            else if (key == "max_depth") c.max_depth = std::stoi(val);
            else if (key == "mis") c.mis = val == "on" || val == "true" || val == "1";
            else if (key == "irr") c.irr = val == "on" || val == "true" || val == "1";
            else if (key == "outlier_suppression") c.outlier_suppression = val == "on" || val == "true" || val == "1";
            else if (key == "outlier_threshold") c.outlier_threshold = std::stod(val);
            else if (key == "sample_rate") c.sample_rate = std::stod(val);
            else if (key == "ir_length") c.ir_length = std::stod(val);
            else if (key == "seed") c.seed = std::stoull(val);
            else if (key == "workers") c.workers = std::stoi(val);
            else if (key == "edge_probability") c.edge_probability = std::stod(val);
            else if (key == "time_offset") c.time_offset = std::stod(val);
            else if (key == "include_direct") c.include_direct = val == "on" || val == "true" || val == "1";
            else if (key == "diffraction_only") c.diffraction_only = val == "on" || val == "true" || val == "1";
            else if (key == "block_size") c.block_size = std::stoi(val);
            else throw std::runtime_error("config: unknown simulation key " + key);
        } else {
            Material* m = nullptr;
            for (auto& [n, mm] : out.materials) {
                if (n == mat_name) m = &mm;
            }
            if (key == "bc") m->bc = parse_bc(val);
            else if (key == "reflection") m->reflection = std::stod(val);
            else if (key == "specularity") m->specularity = std::stod(val);
            else throw std::runtime_error("config: unknown material key " + key);
        }
    }
    return out;
}

ParsedConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open config file " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str());
}

std::string config_to_string(const ParsedConfig& cfg) {
    char buf[128];
    std::string s = "[simulation]\n";
    auto num = [&](const char* k, double v) {
        std::snprintf(buf, sizeof(buf), "%s = %.17g\n", k, v);
        s += buf;
    };
    auto integer = [&](const char* k, long long v) {
        std::snprintf(buf, sizeof(buf), "%s = %lld\n", k, v);
        s += buf;
    };
    auto flag = [&](const char* k, bool v) {
        s += std::string(k) + " = " + (v ? "on" : "off") + "\n";
    };
    const SimulationConfig& c = cfg.simulation;
    num("sound_speed", c.sound_speed);
    num("air_density", c.air_density);
    num("source_energy", c.source_energy);
    num("absorption", c.absorption);
    integer("samples", c.samples);
    integer("max_diffraction_order", c.max_diffraction_order);
    integer("max_depth", c.max_depth);
    flag("mis", c.mis);
    flag("irr", c.irr);
    flag("outlier_suppression", c.outlier_suppression);
    num("outlier_threshold", c.outlier_threshold);
    num("sample_rate", c.sample_rate);
    num("ir_length", c.ir_length);
    integer("seed", static_cast<long long>(c.seed));
    integer("workers", c.workers);
    num("edge_probability", c.edge_probability);
    num("time_offset", c.time_offset);
    flag("include_direct", c.include_direct);
    flag("diffraction_only", c.diffraction_only);
    integer("block_size", c.block_size);
    for (auto& [name, m] : cfg.materials) {
        s += "\n[material " + name + "]\n";
        s += std::string("bc = ") +
             (m.bc == BoundaryCondition::Dirichlet ? "dirichlet" : "neumann") + "\n";
        num("reflection", m.reflection);
        num("specularity", m.specularity);
    }
    return s;
}

Scene assemble_scene(const std::string& obj_path, const ParsedConfig& cfg) {
    std::map<std::string, int> index;
    for (size_t i = 0; i < cfg.materials.size(); ++i) {
        index[cfg.materials[i].first] = static_cast<int>(i);
    }
    LoadedScene loaded = load_obj(obj_path, index);
    std::vector<Material> mats;
    mats.reserve(cfg.materials.size());
    for (auto& [n, m] : cfg.materials) mats.push_back(m);
    return make_scene(std::move(loaded.mesh), std::move(mats));
}

}  // namespace edgewave
