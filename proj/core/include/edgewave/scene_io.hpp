// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <string>

#include "edgewave/transport.hpp"

namespace edgewave {

// Wavefront OBJ subset: v and triangulated f lines (v, v/vt, v/vt/vn and
// v//vn index forms), usemtl selects the material by name. Unknown materials
// map to "default".
struct LoadedScene {
    TriangleMesh mesh;
    std::vector<std::string> material_names;  // per material index
};
LoadedScene load_obj(const std::string& path,
                     const std::map<std::string, int>& material_index);

// Line-oriented key = value configuration with [simulation] and
// [material <name>] sections.
struct ParsedConfig {
    SimulationConfig simulation;
    std::vector<std::pair<std::string, Material>> materials;  // ordered

    ParsedConfig() { materials.emplace_back("default", Material{}); }
    int material_index(const std::string& name) const;
};

ParsedConfig parse_config(const std::string& text);
ParsedConfig load_config(const std::string& path);
std::string config_to_string(const ParsedConfig& cfg);

Scene assemble_scene(const std::string& obj_path, const ParsedConfig& cfg);

}  // namespace edgewave
