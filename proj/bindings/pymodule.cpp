#include <pybind11/pybind11.h>
PYBIND11_MODULE(pyimplo, m) { m.doc() = "stub"; }
