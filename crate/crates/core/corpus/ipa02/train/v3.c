int min(int x, int y) {
    if (x <= y) {
        return x;
    }
    return y;
}

int max(int x, int y) {
    if (x >= y) {
        return x;
    }
    return y;
}

int main() {
    int n, m;
    scanf("%d %d", &n, &m);
    printf("%d\n%d\n", min(n, m), max(n, m));
    return 0;
}
