import setuptools

install_requires = [
    'numpy',
    'scipy',
    'h5py',
    'tqdm',
    'typer',
    'xarray',
    'pydantic>=1.10,<2',
    'python-dotenv',
    'parse',
    'cvxpy>=1.4'
]
extras_require = {
    'doc': ['pdoc3'],
    'test': ['pytest']
}
extras_require["complete"] = sorted({v for req in extras_require.values() for v in req})

with open("README.md", "r", encoding="utf8", errors='ignore') as f:
    long_description = f.read()

setuptools.setup(
    name='bellguess',
    version='0.1.1',
    description="Bell-scenario toolkit: facet inequalities, separating LPs, NPA guessing-probability bounds and "
                "neural-network surrogates",
    long_description=long_description,
    long_description_content_type="text/markdown",
    packages=setuptools.find_packages(exclude=['tests', 'examples', 'examples.*']),
    classifiers=[
        "Programming Language :: Python :: 3",
        "License :: None",
        "Operating System :: OS Independent",
    ],
    python_requires='>=3.9',
    entry_points={
        'console_scripts': [
            'bellguess = bellguess.cli:app',
        ],
    },
    install_requires=install_requires,
    extras_require=extras_require,
    include_package_data=True,
    zip_safe=False
)
