from setuptools import setup, find_packages

setup(
    name="gmfexponents",
    version="0.1.0",
    packages=find_packages(exclude=["tests", "examples", "examples.*"]),
    py_modules=["main"],
    install_requires=[
        "numpy",
        "gmpy2",
        "python-dotenv",
    ],
    extras_require={
        'test': ["pytest"],
    },
    entry_points={
        'console_scripts': [
            'gmfexp=src.cli:main',
            'gmfsuite=main:main',  # 目录全量验收流程
        ],
    },
    description="Sign statistics of q-exponents of generalized modular functions built from weight 2 Hecke eigenforms",
    python_requires=">=3.9",
)
