#pragma once

#include <string>

#include "terraspec/common.hpp"

/// Code of the terraspec::Error thrown by fn, or "" when nothing was thrown.
template <typename Fn>
std::string error_code(Fn&& fn) {
    try {
        fn();
    } catch (const terraspec::Error& e) {
        return e.code();
    }
    return "";
}
