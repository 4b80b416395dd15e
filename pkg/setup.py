from setuptools import setup, find_packages

with open("README.md", "r", encoding="utf-8") as fh:
    long_description = fh.read()

with open("requirements.txt", "r", encoding="utf-8") as fh:
    install_requires = [line.strip() for line in fh if line.strip() and not line.startswith("#")]

setup(
    name="wd-learn",
    version="1.0.0",
    description="Generalization bounds, simulations and classifiers for weakly dependent time series",
    long_description=long_description,
    long_description_content_type="text/markdown",
    packages=find_packages(include=["wd_core", "wd_core.*"]),
    py_modules=["app"],
    include_package_data=True,
    data_files=[("data", ["data/USRECQ.csv"])],
    classifiers=[
        "Development Status :: 4 - Beta",
        "Intended Audience :: Science/Research",
        "Operating System :: OS Independent",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.8",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
        "Programming Language :: Python :: 3.11",
        "Topic :: Scientific/Engineering :: Mathematics",
    ],
    python_requires=">=3.8",
    install_requires=install_requires,
    entry_points={
        "console_scripts": [
            "wdlearn=wd_core.cli:main",
        ],
    },
    extras_require={
        "dev": [
            "pytest>=6.2.0",
            "pytest-cov>=2.0.0",
            "flake8>=3.8.0",
        ],
    },
)
