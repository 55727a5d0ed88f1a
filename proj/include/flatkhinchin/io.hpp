#pragma once

#include <string>

#include <nlohmann/json_fwd.hpp>

#include "flatkhinchin/surface.hpp"

namespace flatkhinchin {

/// Surface spec document:
///   {"polygons":[[[x,y],...],...],
///    "gluings":[[pa,ea,pb,eb],...],
///    "marked_points":[[poly,vertex],...]}
/// Coordinates may be numbers, decimal strings, or "p/q" rational strings;
/// string coordinates keep the validation exact.
TranslationSurface surface_from_json(const nlohmann::json& doc);
TranslationSurface surface_from_json_text(const std::string& text);
TranslationSurface surface_from_file(const std::string& path);

nlohmann::json surface_to_json(const TranslationSurface& s);

/// "builtin:NAME" or a path to a spec file.
TranslationSurface load_surface(const std::string& arg);

nlohmann::json surface_info_json(const TranslationSurface& s);

}  // namespace flatkhinchin
