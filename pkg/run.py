#!/usr/bin/env python3
"""
Bootstrap a virtual environment and forward the arguments to raagspine.

Usage:
    python3 run.py rank --graph fixture:FORK --set L
    python3 run.py verify --suite quick
    python3 run.py --no-install analyze --graph file:my_graph.txt
"""
import os
import subprocess
import sys

VENV_DIR = "venv"
REQUIREMENTS = "requirements.txt"


def ensure_virtual_environment():
    """Create the virtual environment if needed and return its Python"""
    if not os.path.exists(VENV_DIR):
        print("Creating virtual environment...")
        for python in ("python3", "python"):
            try:
                subprocess.run([python, "-m", "venv", VENV_DIR], check=True)
                break
            except (subprocess.CalledProcessError, FileNotFoundError):
                continue
        else:
            print("✗ Error: Failed to create virtual environment.")
            print("Please make sure you have Python 3.10+ installed.")
            sys.exit(1)

    candidates = [
        os.path.join(VENV_DIR, "bin", "python3"),
        os.path.join(VENV_DIR, "bin", "python"),
        os.path.join(VENV_DIR, "Scripts", "python.exe"),
    ]
    for path in candidates:
        if os.path.exists(path):
            return os.path.abspath(path)

    print("✗ Error: Virtual environment exists but Python executable not found.")
    sys.exit(1)


def install_requirements(venv_python):
    """Install requirements.txt into the virtual environment"""
    if not os.path.exists(REQUIREMENTS):
        print(f"Warning: {REQUIREMENTS} not found, skipping installation")
        return
    print("Installing requirements...")
    try:
        subprocess.run([venv_python, "-m", "pip", "install", "-q", "-r", os.path.abspath(REQUIREMENTS)], check=True)
        print("✓ Requirements installed")
    except subprocess.CalledProcessError:
        print("Warning: Failed to install from requirements.txt, continuing anyway")


def main():
    os.chdir(os.path.dirname(os.path.abspath(__file__)))
    args = sys.argv[1:]
    install = "--no-install" not in args
    args = [a for a in args if a != "--no-install"]

    venv_python = ensure_virtual_environment()
    if install:
        install_requirements(venv_python)

    if not args:
        args = ["--help"]
    result = subprocess.run([venv_python, "-m", "raagspine", *args])
    sys.exit(result.returncode)


if __name__ == "__main__":
    main()
