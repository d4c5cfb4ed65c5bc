// Copyright 2026 The txtrace Authors
// SPDX-License-Identifier: Apache-2.0

#include <iostream>

#include <txtrace/cli/cli.hpp>

int main(int argc, char** argv) {
    return txtrace::cli::run({argv + 1, argv + argc}, std::cout, std::cerr);
}
