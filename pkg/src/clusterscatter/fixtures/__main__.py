from .generate import generate

for path in generate():
    print(path)
