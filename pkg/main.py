from cli import lab

if __name__ == "__main__":
    lab()
