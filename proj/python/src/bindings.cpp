#include <pybind11/pybind11.h>
PYBIND11_MODULE(_ptgames, m) { m.doc() = "stub"; }
