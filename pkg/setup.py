from setuptools import setup, find_packages

setup(
    name="heisenberg_lw_lab",
    version="0.1.0",
    packages=find_packages(include=["src", "src.*"]),
    install_requires=[
        "python-dotenv>=0.19.0",
        "pydantic>=1.8.2,<2.0.0",
        "pandas>=1.5.0,<2.0.0",
        "numpy>=1.21.2,<2.0.0",
        "sympy>=1.9",
        "joblib>=1.1.0",
    ],
    entry_points={"console_scripts": ["heis-lab=src.cli:main"]},
    python_requires=">=3.9",
)
