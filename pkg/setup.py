from setuptools import setup, find_packages

with open("README.md", "r", encoding="utf-8") as fh:
    long_description = fh.read()

with open("requirements.txt", "r", encoding="utf-8") as fh:
    requirements = [line.strip() for line in fh if line.strip() and not line.startswith("#")]

setup(
    name="cat_teleport",
    version="0.1.0",
    description="Simulation and verification of entangled coherent state teleportation with linear optics",
    long_description=long_description,
    long_description_content_type="text/markdown",
    packages=find_packages(include=["cat_teleport", "cat_teleport.*"]),
    package_data={"cat_teleport": ["schemas/*.json"]},
    entry_points={"console_scripts": ["cat-teleport=cat_teleport.cli:main"]},
    classifiers=[
        "Development Status :: 3 - Alpha",
        "Intended Audience :: Science/Research",
        "Topic :: Scientific/Engineering :: Physics",
        "License :: OSI Approved :: MIT License",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.12",
        "Programming Language :: Python :: 3.13",
    ],
    python_requires=">=3.12",
    install_requires=requirements,
)
