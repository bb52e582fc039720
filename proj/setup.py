import shutil
import subprocess
import sys
from pathlib import Path

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class CMakeExtension(Extension):
    def __init__(self, name):
        super().__init__(name, sources=[])


class CMakeBuild(build_ext):
    def build_extension(self, ext):
        source_dir = Path(__file__).parent.resolve()
        out_dir = Path(self.get_ext_fullpath(ext.name)).parent.resolve()
        out_dir.mkdir(parents=True, exist_ok=True)
        build_dir = Path(self.build_temp).resolve()
        build_dir.mkdir(parents=True, exist_ok=True)

        import pybind11

        subprocess.run(
            [
                "cmake",
                "-S", str(source_dir),
                "-B", str(build_dir),
                "-DAVTSE_BUILD_PYTHON=ON",
                "-DCMAKE_BUILD_TYPE=Release",
                f"-DCMAKE_LIBRARY_OUTPUT_DIRECTORY={out_dir}",
                f"-DPython_EXECUTABLE={sys.executable}",
                # the interpreter's own pybind11, not whatever cmake finds first
                f"-Dpybind11_DIR={pybind11.get_cmake_dir()}",
            ],
            check=True,
        )
        subprocess.run(
            ["cmake", "--build", str(build_dir), "--target", "_avtse", "--target", "avtse",
             "--parallel"],
            check=True,
        )

        bin_dir = out_dir / "bin"
        if getattr(self, "editable_mode", False):
            # editable installs import straight from the source tree
            bin_dir = source_dir / "python" / "avtse" / "bin"
        bin_dir.mkdir(parents=True, exist_ok=True)
        shutil.copy2(build_dir / "avtse", bin_dir / "avtse")


setup(
    ext_modules=[CMakeExtension("avtse._avtse")],
    cmdclass={"build_ext": CMakeBuild},
)
