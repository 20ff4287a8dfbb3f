// Copyright 2026 FairLENS contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "fairlens/corpus.hpp"

namespace fairlens {

/// RFC 4180 records: quoted fields may hold commas, quotes ("") and line
/// breaks. CRLF and LF line endings are both accepted.
std::vector<std::vector<std::string>> parse_csv(std::istream& in);

/// Converts a CSV table with a header row into manifest JSONL. Required
/// columns: id, reference and one per schema attribute. Dialogue cells hold
/// both speakers' labels as "X|Y". Numeric Age cells stay numeric so the
/// manifest loader buckets them. Other columns become metadata. Returns the
/// number of records written.
std::size_t csv_to_manifest(std::istream& csv, const AttributeSchema& schema, std::ostream& out);

}  // namespace fairlens
