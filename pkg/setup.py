from setuptools import setup, find_packages

setup(
    name="open-system-lab",
    version="0.1.0",
    packages=find_packages(exclude=["tests", "examples", "examples.*"]),
    py_modules=["main"],
    include_package_data=True,
    package_data={"templates": ["*.j2"]},
    python_requires=">=3.10",
    install_requires=[
        "numpy>=1.26,<3.0",
        "scipy>=1.11",
        "pandas>=2.1",
        "pydantic>=2.0,<3.0",
        "sqlalchemy==2.0.36",
        "python-dotenv==0.21.1",
        "sqlmodel==0.0.16",
        "tenacity==8.2.3",
        "jinja2==3.1.2",
        "click>=8.1",
        "tomli>=2.0; python_version<'3.11'",
    ],
    extras_require={"test": ["pytest>=7.4"]},
    entry_points={"console_scripts": ["lab=cli:lab"]},
)
