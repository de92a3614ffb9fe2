// Copyright 2026 The MDD Toolkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Idle-qubit fidelity of a random 4-qubit state under several sequences.

#include <cstdio>

#include "mdd.hpp"

int main() {
    using namespace mdd;
    const NoiseParams noise;
    const auto psi = haar_random_state(4, 2026);
    std::printf("%8s", "t");
    const char *names[] = {"none", "xx", "xy4", "udd8", "mdd"};
    for (const char *n : names) std::printf("%10s", n);
    std::printf("\n");
    for (double t : geometric_grid(1000.0, 8)) {
        std::printf("%8.2f", t);
        for (const char *n : names) std::printf("%10.5f", idle_fidelity(psi, SequenceSpec::parse(n), t, noise));
        std::printf("\n");
    }
}
