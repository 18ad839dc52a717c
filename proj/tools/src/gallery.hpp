#ifndef TOOLS_GALLERY_HPP
#define TOOLS_GALLERY_HPP

#include <string>
#include <vector>

namespace cli {

// Bundled config text by name; nullptr when unknown.
const char* gallery_config(const std::string& name);
std::vector<std::string> gallery_names();

}  // namespace cli

#endif
