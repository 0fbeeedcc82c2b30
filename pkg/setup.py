import setuptools

with open("README.md", "r") as fh:
    long_description = fh.read()

setuptools.setup(
    name="critlink",
    version="0.1.0",
    author="Joseph Ryan",
    author_email="jr@aphyt.com",
    description="Linking geometries, minimax levels and localized almost critical points of functionals on R^n",
    long_description=long_description,
    long_description_content_type="text/markdown",
    package_dir={"": "src"},
    packages=setuptools.find_packages(where="src"),
    install_requires=["numpy>=1.24", "scipy>=1.10"],
    extras_require={"test": ["hypothesis>=6.0"]},
    entry_points={"console_scripts": ["critlink=critlink.cli.run:main"]},
    classifiers=[
        "Programming Language :: Python :: 3",
        "License :: OSI Approved :: GNU General Public License v2 (GPLv2)",
        "Operating System :: OS Independent",
        "Topic :: Scientific/Engineering :: Mathematics",
    ],
    python_requires='>=3.11',
)
