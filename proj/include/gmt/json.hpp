// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <json.hpp>

namespace gmt {
// Insertion-ordered documents keep serialized reports byte-stable.
using Json = nlohmann::ordered_json;
}  // namespace gmt
